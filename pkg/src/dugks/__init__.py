"""Command line entry-point for the DUGKS Allen-Cahn solver."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .benchmarks import CONVERGENCE_GRIDS, PRESET_NAMES
from .config import ConfigError, collect_overrides, load_config
from .runner import BenchmarkRunner
from .solver import DivergenceError
from .tables import TABLES, convergence_driver, table_driver


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a configuration key (repeatable). Takes precedence over DUGKS_<KEY> variables.",
    )
    parser.add_argument(
        "--quiet",
        action="store_true",
        help="Suppress per-period and per-cell progress lines.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Discrete unified gas kinetic scheme for the conservative Allen-Cahn equation.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a single benchmark described by a config file.")
    run.add_argument(
        "--config",
        type=Path,
        required=True,
        help="Flat 'key = value' configuration file.",
    )
    run.add_argument(
        "--output",
        type=Path,
        default=None,
        help="Directory for artifacts (default: the 'output' key or runs/<benchmark>).",
    )
    _add_common_flags(run)

    table = commands.add_parser("table", help="Reproduce one of the published accuracy tables.")
    table.add_argument("--which", choices=TABLES, required=True, help="Table to reproduce.")
    table.add_argument(
        "--out",
        type=Path,
        default=Path("tables"),
        help="Directory where <which>.csv is written (default: tables)",
    )
    table.add_argument(
        "--periods",
        type=int,
        default=None,
        help="Number of periods per cell, for scaled-down sweeps.",
    )
    table.add_argument(
        "--parallel",
        type=int,
        default=1,
        help="Run cells in this many independent processes (default: 1).",
    )
    _add_common_flags(table)

    convergence = commands.add_parser("convergence", help="Grid refinement study for one preset.")
    convergence.add_argument("--preset", choices=PRESET_NAMES, required=True)
    convergence.add_argument(
        "--out",
        type=Path,
        default=Path("tables"),
        help="Directory where table4.csv is written (default: tables)",
    )
    convergence.add_argument(
        "--grids",
        type=int,
        nargs="+",
        default=list(CONVERGENCE_GRIDS),
        help="Grid sizes, successive doublings (default: 50 100 200 400).",
    )
    convergence.add_argument("--parallel", type=int, default=1)
    _add_common_flags(convergence)
    return parser


def main(argv: Sequence[str] | None = None) -> None:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)

    try:
        if args.command == "run":
            overrides = list(args.overrides)
            if args.output is not None:
                overrides.append(f"output={args.output}")
            spec = load_config(args.config, env=os.environ, overrides=overrides)
            with BenchmarkRunner(spec, quiet=args.quiet) as runner:
                runner.run()
        elif args.command == "table":
            overrides = collect_overrides(os.environ, args.overrides)
            if args.periods is not None:
                overrides["periods"] = str(args.periods)
            table_driver(
                args.which,
                args.out,
                overrides=overrides,
                parallel=args.parallel,
                quiet=args.quiet,
            )
        else:
            convergence_driver(
                args.preset,
                args.out,
                grids=args.grids,
                overrides=collect_overrides(os.environ, args.overrides),
                parallel=args.parallel,
                quiet=args.quiet,
            )
    except ConfigError as exc:
        print(f"Configuration error: {exc}", file=sys.stderr)
        raise SystemExit(2)
    except DivergenceError as exc:
        print(f"Run aborted: {exc}", file=sys.stderr)
        raise SystemExit(3)
    except OSError as exc:
        print(f"Cannot write artifacts: {exc}", file=sys.stderr)
        raise SystemExit(2)


__all__ = [
    "main",
    "build_parser",
]
