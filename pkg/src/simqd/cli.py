"""Command line entry points.

    simqd kernel   --config c.json --out dir/
    simqd dynamics --config c.json --out dir/
    simqd sweep    --config c.json --axis duration --out dir/
    simqd oracle   --report r.json [--seed N]

Exit codes: 0 success, 2 configuration error, 3 numeric-convergence or
oracle failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import parse_config
from .errors import ConfigError, PrecisionError, QuadratureError
from .material import GAAS_DEFAULT
from .oracle import oracle_report
from .runner import run_dynamics, run_kernel, run_sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simqd",
        description="Phonon-dephased two-level emitter driven by a one-photon pulse.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("kernel", "tabulate the dephasing exponent per temperature"),
        ("dynamics", "time evolution per (temperature, duration) pair"),
        ("sweep", "transfer efficiency along one swept coordinate"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        if name == "sweep":
            p.add_argument(
                "--axis",
                choices=("duration", "temperature", "rate_ratio"),
                default=None,
                help="swept coordinate (overrides config)",
            )

    p = sub.add_parser("oracle", help="self-check against the closed-form model")
    p.add_argument("--report", required=True, help="where to write the JSON report")
    p.add_argument("--seed", type=int, default=None, help="RNG seed")
    p.add_argument("--samples", type=int, default=None,
                   help="Monte Carlo sample count (default 200000)")
    p.add_argument("--modes", type=int, default=None,
                   help="discretization mode count (default 2000)")
    return parser


def _run_oracle(args) -> int:
    kwargs = {}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.samples is not None:
        kwargs["n_samples"] = args.samples
    if args.modes is not None:
        kwargs["n_modes"] = args.modes
    report = oracle_report(GAAS_DEFAULT, **kwargs)
    with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not report["all_pass"]:
        print("oracle: self-check FAILED, see report", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            return _run_oracle(args)
        cfg = parse_config(args.config)
        if args.command == "kernel":
            run_kernel(cfg, out=args.out)
        elif args.command == "dynamics":
            run_dynamics(cfg, out=args.out)
        else:
            run_sweep(cfg, out=args.out, axis=args.axis)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, PrecisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
