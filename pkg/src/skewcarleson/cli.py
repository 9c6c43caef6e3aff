"""Command-line entry point: ``skewcarleson <subcommand> --config <path>``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import THREADS_ENV, ExperimentConfig, load_config, worker_count
from .errors import (
    ConfigError,
    DivergenceError,
    EvaluationError,
    ParameterError,
    ResourceError,
    SkewCarlesonError,
)
from .report import emit, to_json
from .runner import SUBCOMMANDS, run

EXIT_OK = 0
EXIT_ACCEPTANCE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5

_HELP = {
    "params": "derived exponents (lam, gamma, theta) and hypothesis flags",
    "geometry": "ball volumes, delta comparability and lattice summary",
    "carleson": "skew-Carleson classification with its norm sweep",
    "berezin": "Berezin-transform diagnostic",
    "toeplitz": "operator-norm sandwich: lower probe, norm estimate, skew-Carleson norm",
    "vanishing": "compactness probe along a boundary sequence",
    "verify": "built-in acceptance battery",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewcarleson",
        description="Numerical diagnostics for skew Carleson measures and Toeplitz operators "
                    "on weighted Bergman spaces of the unit ball.",
        epilog=f"Set {THREADS_ENV} to override the worker count.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", type=Path, default=None,
                       help="YAML or JSON experiment file (defaults apply when omitted)")
        p.add_argument("--out", type=Path, default=None, help="output path; JSON goes to stdout when omitted")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=None, help="overrides the seed in the config")
        p.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config is not None else ExperimentConfig()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed", "must be nonnegative")
        cfg.seed = args.seed
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        workers = worker_count()
        cfg = _load(args)
        report = run(args.subcommand, cfg)
        report.timing["workers"] = workers
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DivergenceError, EvaluationError) as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except SkewCarlesonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    include_timing = not args.no_timing
    try:
        if args.out is None:
            if args.format == "csv":
                print("error: --format csv needs --out", file=sys.stderr)
                return EXIT_CONFIG
            sys.stdout.write(to_json(report, include_timing))
        else:
            emit(report, args.out, args.format, include_timing)
    except OSError as exc:
        print(f"io error: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    if args.subcommand == "verify":
        for key in sorted(report.results, key=lambda k: int(k.split("_")[1])):
            res = report.results[key]
            status = "PASS" if res["passed"] else "FAIL"
            print(f"[{status}] {key.replace('_', ' ')}: {res['name']}", file=sys.stderr)
        if not report.flags.get("all_passed", False):
            return EXIT_ACCEPTANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
