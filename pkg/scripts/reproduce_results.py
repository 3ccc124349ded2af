#!/usr/bin/env python3
"""Regenerate every experiment CSV (and the validation table) in one go.

Usage:
    python3 scripts/reproduce_results.py [--out results] [--full]

The default grids are desk-scale so the whole run finishes in about a
minute.  ``--full`` switches to the wide grids (segments up to 1024,
channels up to 1024, distances to 2000 km), which is what the headline
figures use; expect a few minutes of compute.  The validation step always
runs at its calibrated trial count (the agreement tolerances assume it).
"""

import argparse
import sys
import time
from pathlib import Path

from repeaterscope.cli import main as cli_main

FULL_GRID = """
distances_km = 50, 100, 200, 500, 1000, 2000
n_segment_options = 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024
channel_options = 1, 4, 16, 64, 256, 1024
relay_spacings_km = 1, 2, 5, 10, 15, 20, 25, 30, 40, 50
"""

EXPERIMENTS = ("relay-expectation", "mtp-sweep", "envelope-compare", "cost-compare")


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument("--full", action="store_true", help="use the wide sweep grids")
    args = parser.parse_args(argv)

    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    config_args = []
    if args.full:
        config_path = out_root / "full_grid.cfg"
        config_path.write_text(FULL_GRID)
        config_args = ["--config", str(config_path)]

    status = 0
    for name in EXPERIMENTS + ("validate",):
        t0 = time.time()
        code = cli_main(
            ["run", name, "--out", str(out_root / name),
             "--seed", str(args.seed), *config_args]
        )
        print(f"{name}: exit {code} in {time.time() - t0:.1f}s")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(run())
