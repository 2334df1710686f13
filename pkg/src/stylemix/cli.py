"""Command-line entry point: ``stylemix {mix-image,mix-feature,run}``.

Exit codes: 0 success, 1 processing failure (any failed entry for ``run``),
2 invalid arguments, config or manifest.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import config as cfgmod
from .feature_mixer import MixParams, mix_features
from .pipeline import emit_report, run_manifest
from .rng import derive_stream, sample_omega
from .spectral import image_style_mix
from .tensor_io import (
    ManifestError,
    load_image,
    load_tensor,
    parse_manifest,
    save_image,
    save_tensor,
)

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be a 64-bit unsigned integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylemix", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mix-image", help="amplitude-mix one source/styled image pair")
    p.add_argument("--src", required=True)
    p.add_argument("--sty", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--omega", type=_unit_float,
                   help="mixing weight; sampled from U[0.5, 1.0) with --seed when omitted")
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("mix-feature", help="smooth feature-level mixing of one tensor pair")
    p.add_argument("--src", required=True, help="image-mixed feature map (.npy)")
    p.add_argument("--sty", required=True, help="diversified feature map (.npy)")
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=_unit_float,
                   help="mixing weight; sampled from Beta(0.1, 2.0) with --seed when omitted")
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--gmm-components", type=_positive_int, default=5)
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("run", help="process a JSON-lines manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="TOML config file (defaults when omitted)")
    p.add_argument("--preset", choices=sorted(cfgmod.PRESETS),
                   help="start from a named parameter preset; config-file keys still apply")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--report")
    return parser


def _mix_image(args) -> int:
    src = load_image(args.src)
    sty = load_image(args.sty)
    omega = args.omega
    if omega is None:
        defaults = cfgmod.RunConfig()
        omega = sample_omega(derive_stream(args.seed, 0), defaults.gamma1, defaults.gamma2)
    out, residue = image_style_mix(src, sty, omega, return_residue=True)
    save_image(out, args.out)
    print(json.dumps({"omega": omega, "imag_residue_rms": residue.tolist()}))
    return EXIT_OK


def _mix_feature(args) -> int:
    f_m = load_tensor(args.src)
    f_st = load_tensor(args.sty)
    params = MixParams(gmm_components=args.gmm_components, shuffle=not args.no_shuffle)
    result = mix_features(f_m, f_st, params, derive_stream(args.seed, 0), beta=args.beta)
    save_tensor(result.fmap, args.out)
    print(json.dumps({
        "beta": result.beta,
        "permutation": result.permutation.tolist(),
        "replaced_channels": result.replaced.tolist(),
    }))
    return EXIT_OK


def _resolve_config(args) -> cfgmod.RunConfig:
    flags = {k: v for k, v in (("preset", args.preset), ("seed", args.seed),
                               ("workers", args.workers), ("report_path", args.report))
             if v is not None}
    if args.config:
        return cfgmod.load_config(args.config, overrides=flags)
    return cfgmod.from_mapping(flags)


def _run(args) -> int:
    try:
        cfg = _resolve_config(args)
        entries = parse_manifest(args.manifest)
    except (cfgmod.ConfigError, ManifestError) as exc:
        print(f"stylemix: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"stylemix: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    report = run_manifest(entries, cfg)
    if cfg.report_path:
        emit_report(report, cfg.report_path)
    summary = report.summary()
    print(f"processed {summary['n_succeeded']}/{summary['n_manifest']} entries, "
          f"{summary['n_failed']} failed, {summary['n_slow']} slow", file=sys.stderr)
    for failure in report.failures:
        print(f"  entry {failure['entry_index']}: {failure['error']}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    handler = _mix_image if args.command == "mix-image" else _mix_feature
    try:
        return handler(args)
    except (OSError, ValueError) as exc:
        print(f"stylemix: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
