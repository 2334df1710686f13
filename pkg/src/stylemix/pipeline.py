"""Batch execution of a manifest and the JSON run report."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .feature_mixer import MixParams, mix_features
from .rng import derive_stream, sample_omega
from .spectral import image_style_mix
from .tensor_io import (
    ManifestEntry,
    load_image,
    load_tensor,
    parse_manifest,
    save_image,
    save_tensor,
)

log = logging.getLogger(__name__)

# Wall-time budget for one 3x640x640 image pair; entries over
# SLOW_FACTOR times their pixel-scaled budget are flagged.
REFERENCE_PIXELS = 3 * 640 * 640
REFERENCE_SECONDS = 0.1
SLOW_FACTOR = 10.0


@dataclass
class RunReport:
    config: dict
    n_manifest: int
    entries: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        slow = sum(1 for r in self.entries if r.get("slow"))
        return {
            "n_manifest": self.n_manifest,
            "n_succeeded": len(self.entries),
            "n_failed": len(self.failures),
            "n_slow": slow,
            "wall_time_s": self.wall_time_s,
        }

    def to_dict(self) -> dict:
        return {
            "summary": self.summary(),
            "config": self.config,
            "entries": self.entries,
            "failures": self.failures,
        }


def time_budget(n_values: int) -> float:
    return REFERENCE_SECONDS * max(1.0, n_values / REFERENCE_PIXELS)


def _image_entry(entry: ManifestEntry, cfg: RunConfig, rng) -> dict:
    src = load_image(entry.source_path)
    sty = load_image(entry.styled_path)
    if src.shape != sty.shape:
        raise ValueError(f"image shapes differ: {src.shape} vs {sty.shape}")
    omega = sample_omega(rng, cfg.gamma1, cfg.gamma2)
    out, residue = image_style_mix(src, sty, omega, return_residue=True)
    entry.output_path.parent.mkdir(parents=True, exist_ok=True)
    save_image(out, entry.output_path)
    return {
        "omega": omega,
        "imag_residue_rms": float(np.sqrt(np.mean(residue**2))),
        "n_values": int(src.size),
    }


def _feature_entry(entry: ManifestEntry, cfg: RunConfig, rng) -> dict:
    f_m = load_tensor(entry.source_path)
    f_st = load_tensor(entry.styled_path)
    params = MixParams(cfg.beta_a, cfg.beta_b, cfg.gmm_components, cfg.shuffle)
    result = mix_features(f_m, f_st, params, rng)
    entry.output_path.parent.mkdir(parents=True, exist_ok=True)
    save_tensor(result.fmap, entry.output_path)
    return {
        "beta": result.beta,
        "permutation": result.permutation.tolist(),
        "replaced_channels": result.replaced.tolist(),
    }


def process_entry(entry: ManifestEntry, cfg: RunConfig) -> tuple[bool, dict]:
    """Process one entry; never raises. Returns ``(ok, record)``."""
    record = {
        "entry_index": entry.entry_index,
        "mode": entry.mode,
        "source": str(entry.source_path),
        "styled": str(entry.styled_path),
        "output": str(entry.output_path),
    }
    rng = derive_stream(cfg.seed, entry.entry_index)
    start = time.perf_counter()
    try:
        if entry.mode == "image":
            record.update(_image_entry(entry, cfg, rng))
        else:
            record.update(_feature_entry(entry, cfg, rng))
    except Exception as exc:  # one bad entry must not sink the batch
        log.warning("entry %d failed: %s", entry.entry_index, exc)
        record["error"] = f"{type(exc).__name__}: {exc}"
        return False, record
    elapsed = time.perf_counter() - start
    record["wall_time_s"] = elapsed
    if entry.mode == "image":
        n_values = record.pop("n_values")
        record["slow"] = elapsed > SLOW_FACTOR * time_budget(n_values)
    return True, record


def run_manifest(manifest, config: RunConfig) -> RunReport:
    """Process every entry of ``manifest`` (a path or a list of entries).

    Entries run on a pool of ``config.workers`` threads; each draws from its
    own stream derived from ``(config.seed, entry_index)``, so the outputs do
    not depend on the worker count. Records keep manifest order.
    """
    if isinstance(manifest, (str, Path)):
        entries = parse_manifest(manifest)
    else:
        entries = list(manifest)
    # workers and report_path do not influence outputs, so they stay out of the report
    echo = {k: v for k, v in config.to_dict().items() if k not in ("workers", "report_path")}
    report = RunReport(config=echo, n_manifest=len(entries))
    start = time.perf_counter()
    if config.workers == 1 or len(entries) <= 1:
        results = [process_entry(e, config) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda e: process_entry(e, config), entries))
    for ok, record in results:
        (report.entries if ok else report.failures).append(record)
    report.wall_time_s = time.perf_counter() - start
    return report


def emit_report(report: RunReport, path) -> None:
    text = json.dumps(report.to_dict(), indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")
