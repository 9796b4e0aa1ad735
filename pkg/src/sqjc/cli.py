"""``sqjc`` command line: family, solve, validate, transform.

Exit codes: 0 success, 1 validation failure or infeasible model, 2 bad
configuration or arguments.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .invariant import ConstraintViolation
from .pipeline import ConstraintCheckFailed, cmd_family, cmd_solve, cmd_transform, cmd_validate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqjc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "family": "tabulate the derived counter-rotating coupling and squeezing trajectory",
        "solve": "write the exact solution for the configured (m, sigma)",
        "validate": "run every oracle check and write validation.csv",
        "transform": "dump the squeezed-frame coefficients",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        sp.add_argument("--out", type=Path, help="output directory (overrides the config)")
        sp.add_argument("--dt", type=float, help="propagator step (overrides the config)")
        sp.add_argument("--nmax", type=int, help="photon cutoff (overrides the config)")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config).with_overrides(out_dir=args.out, dt=args.dt, n_max=args.nmax)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate":
            report = cmd_validate(cfg)
            for line in report.lines():
                print(line)
            if not report.passed:
                names = ", ".join(c.name for c in report.failed)
                print(f"validation FAILED: {names}", file=sys.stderr)
                return EXIT_FAIL
            print("validation passed")
            return EXIT_OK
        if args.command == "family":
            paths = cmd_family(cfg)
        elif args.command == "solve":
            paths = cmd_solve(cfg)
        else:
            paths = cmd_transform(cfg)
    except (ConstraintCheckFailed, ConstraintViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
