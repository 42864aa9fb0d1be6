"""Stationary mass on the global minimum as the variance ladder is descended.

Uses the frozen-parameter generator of a small table objective and prints, per
level, sigma^2, the matching temperature and pi(argmin f).

    python scripts/ladder_limit.py --levels 40
"""

import argparse

import numpy as np

from aqcls.evolution import Schedule
from aqcls.hamiltonians import ProblemFamily, transverse_field_initial
from aqcls.markov import GenerationContext, exact_generation_matrix, ladder_stationary
from aqcls.search import temperature_of_variance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--values", default="3,1,2,0", help="objective table, comma separated")
    ap.add_argument("--q", type=float, default=0.9)
    ap.add_argument("--tau", type=float, default=2.0)
    ap.add_argument("--eta", type=float, default=0.2)
    ap.add_argument("--levels", type=int, default=30)
    args = ap.parse_args()

    f = np.array([float(v) for v in args.values.split(",")])
    n = int(np.log2(f.size))
    ctx = GenerationContext(transverse_field_initial(n), ProblemFamily.diagonal(f.size, (-1.0, 1.0)),
                            Schedule(), args.q)
    a = exact_generation_matrix(ctx, args.tau)
    best = int(np.argmin(f))
    print(f"{'level':>5} {'sigma2':>10} {'T':>8} pi(argmin)")
    for k, (s2, pi) in enumerate(ladder_stationary(a.entries, f, 1.0, args.eta, args.levels)):
        print(f"{k:>5} {s2:>10.3e} {temperature_of_variance(s2, 1.0):>8.3f} {pi[best]:.6f}")


if __name__ == "__main__":
    main()
