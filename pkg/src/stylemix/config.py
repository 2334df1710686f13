"""Run configuration, TOML loading and named presets."""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    gamma1: float = 0.5
    gamma2: float = 1.0
    beta_a: float = 0.1
    beta_b: float = 2.0
    gmm_components: int = 5
    shuffle: bool = True
    seed: int = 0
    workers: int = 1
    report_path: str | None = None

    def __post_init__(self):
        validate(self)

    def to_dict(self) -> dict:
        return asdict(self)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate(cfg: RunConfig) -> None:
    for name in ("gamma1", "gamma2", "beta_a", "beta_b"):
        if not _is_number(getattr(cfg, name)):
            raise ConfigError(f"{name} must be a number, got {getattr(cfg, name)!r}")
    if cfg.gamma1 < 0:
        raise ConfigError(f"gamma1 must be >= 0, got {cfg.gamma1}")
    if cfg.gamma2 > 1:
        raise ConfigError(f"gamma2 must be <= 1, got {cfg.gamma2}")
    if cfg.gamma1 > cfg.gamma2:
        raise ConfigError(f"gamma1 ({cfg.gamma1}) must not exceed gamma2 ({cfg.gamma2})")
    if not cfg.beta_a > 0:
        raise ConfigError(f"beta_a must be positive, got {cfg.beta_a}")
    if not cfg.beta_b > 0:
        raise ConfigError(f"beta_b must be positive, got {cfg.beta_b}")
    if not _is_int(cfg.gmm_components) or cfg.gmm_components < 1:
        raise ConfigError(f"gmm_components must be an integer >= 1, got {cfg.gmm_components!r}")
    if not isinstance(cfg.shuffle, bool):
        raise ConfigError(f"shuffle must be true or false, got {cfg.shuffle!r}")
    if not _is_int(cfg.seed) or not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {cfg.seed!r}")
    if not _is_int(cfg.workers) or cfg.workers < 1:
        raise ConfigError(f"workers must be an integer >= 1, got {cfg.workers!r}")
    if cfg.report_path is not None and not isinstance(cfg.report_path, str):
        raise ConfigError(f"report_path must be a string, got {cfg.report_path!r}")


def _grid() -> dict[str, dict]:
    presets = {"default": {}}
    # omega range sweep, Beta held at (0.1, 1.0)
    for g1, g2 in [(0.0, 0.5), (0.0, 0.8), (0.0, 1.0), (0.3, 1.0),
                   (0.5, 1.0), (0.8, 1.0), (1.0, 1.0)]:
        presets[f"omega-{g1:.1f}-{g2:.1f}"] = dict(gamma1=g1, gamma2=g2, beta_a=0.1, beta_b=1.0)
    # Beta shape sweep, omega range held at (0.5, 1.0)
    for a, b in [(0.1, 0.1), (0.1, 1.0), (0.1, 2.0), (1.0, 1.0),
                 (0.8, 1.2), (2.0, 0.5), (0.5, 2.0), (2.0, 2.0)]:
        presets[f"beta-{a:.1f}-{b:.1f}"] = dict(gamma1=0.5, gamma2=1.0, beta_a=a, beta_b=b)
    return presets


PRESETS = _grid()
FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def preset(name: str) -> RunConfig:
    try:
        return RunConfig(**PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def from_mapping(data: dict, base: RunConfig | None = None) -> RunConfig:
    """Build a config from a flat mapping; an optional ``preset`` key picks the base."""
    data = dict(data)
    name = data.pop("preset", None)
    if name is not None:
        base = preset(name)
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return replace(base or RunConfig(), **data)


def read_toml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Load a flat TOML config; ``overrides`` (e.g. CLI flags) win over file keys."""
    data = read_toml(path)
    data.update(overrides or {})
    return from_mapping(data)
