#!/usr/bin/env python3
"""Four-topology comparison table for N = 4.

Prints the exact uniform-weight value at p = 1/2 next to the Monte Carlo
mean under i.i.d. uniform random weights (the loopless rows agree with the
p = 1/2 column; the ring and complete graph land higher because maximising
over paths before averaging gains from weight fluctuations).
"""

import argparse
import sys
from fractions import Fraction

from qnetfid import TopologySpec, run_scenario_C, uniform_value


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    print(f"{'topology':<10} {'uniform p=1/2':>16} {'random weights':>17}")
    for family in ("chain", "star", "ring", "complete"):
        exact = uniform_value(family, 4, None, Fraction(1, 2))
        est = run_scenario_C(
            TopologySpec(family, 4), args.samples, seed=args.seed, threads=args.threads
        )
        print(
            f"{family:<10} {str(exact):>7} ({float(exact):.4f}) "
            f"{est.mean:>9.4f} +/- {3 * est.std_error:.4f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
