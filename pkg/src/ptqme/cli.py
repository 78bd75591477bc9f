"""Command-line entry point: run, validate, list-builtins."""

from __future__ import annotations

import argparse
import sys as _sys
from dataclasses import replace

from .config import load_config, validate
from .errors import ConfigurationError
from .runner import run


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the INI config file")
    p.add_argument("--out", default=None, help="override the output directory")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ptqme",
        description=(
            "Open-quantum-system dynamics of an N-level transfer coordinate in "
            "a Drude bath: second-order master equations, their canonically "
            "corrected variant, and the exact hierarchy benchmark."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="execute a scenario from a config file")
    _add_common(p_run)
    p_run.add_argument("--threads", type=int, default=1,
                       help="workers for (method, gamma) pairs")
    p_run.add_argument("--seedless", action="store_true",
                       help="assert the pipeline is deterministic (it draws no "
                            "random numbers; this flag only documents the claim)")

    p_val = sub.add_parser("validate", help="check a config file and report all problems")
    _add_common(p_val)

    sub.add_parser("list-builtins", help="list built-in systems and potentials")

    args = parser.parse_args(argv)

    if args.verb == "list-builtins":
        print("systems:    taa6 (six-level transfer coordinate, table data)")
        print("potentials: surrogate-taa (calibrated quartic double well)")
        print("            harmonic (unit-frequency oscillator)")
        print("            file:<path> (two-column q/V text file)")
        return 0

    try:
        cfg = load_config(args.config)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)

    problems = validate(cfg)
    if args.verb == "validate":
        if problems:
            for p in problems:
                print(f"problem: {p}")
            return 1
        print("config ok")
        return 0

    if problems:
        for p in problems:
            print(f"problem: {p}", file=_sys.stderr)
        return 1
    summary = run(cfg, threads=args.threads)
    print(f"wrote {len(summary['runs'])} runs to {cfg.out_dir}/ (summary.json)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
