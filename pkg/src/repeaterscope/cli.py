"""Command-line front end.

    repeaterscope run <experiment> [--config FILE] [--out DIR]
                                   [--seed N] [--trials N]
    repeaterscope validate [--config FILE] [--out DIR] [--seed N] [--trials N]

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .config import Config, ConfigError, load_config, with_overrides
from .experiments import EXPERIMENTS, run_experiment
from .policy import ScheduleError
from .pmfengine import CertainResetError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repeaterscope",
        description="Performance engine for multiplexed quantum repeater chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("experiment", choices=EXPERIMENTS)
    _common_args(run)

    validate = sub.add_parser("validate", help="run the engine-vs-oracle acceptance suite")
    _common_args(validate)
    return parser


def _common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="output directory (default: from config)")
    parser.add_argument("--seed", type=int, help="random seed override")
    parser.add_argument("--trials", type=int, help="Monte Carlo trial count override")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    experiment = "validate" if args.command == "validate" else args.experiment
    try:
        config = load_config(args.config) if args.config else Config()
        config = with_overrides(config, seed=args.seed, trials=args.trials)
        out_dir = args.out if args.out is not None else config.out_dir
        return run_experiment(experiment, config, out_dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ScheduleError, CertainResetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
