#!/usr/bin/env python3
"""Regenerate every figure-data CSV into an output directory.

Each preset is one plot-ready table; see the README for what each one
contains. Heavier presets (fig2/fig3c Monte Carlo columns) honour
--samples so a quick pass is possible.
"""

import argparse
import os
import sys

from qnetfid.cli import main as cli_main

PRESETS = ("fig2", "fig3a", "fig3b", "fig3c", "fig3def", "fig4", "fig5")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=None,
                        help="override Monte Carlo sample counts")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    for preset in PRESETS:
        argv = ["sweep", "--preset", preset, "--seed", str(args.seed),
                "-o", os.path.join(args.out_dir, f"{preset}.csv")]
        if args.samples is not None:
            argv += ["--samples", str(args.samples)]
        if args.threads is not None:
            argv += ["--threads", str(args.threads)]
        print(f"== {preset}")
        code = cli_main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
