"""Minimal Grover run time per qubit count for each schedule, plus growth ratios.

    python scripts/grover_schedules.py --n-max 5
"""

import argparse

from aqcls.evolution import Schedule
from aqcls.grover import growth_ratios, schedule_comparison


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--target", type=float, default=0.9)
    ap.add_argument("--steepness", type=float, default=3.0)
    args = ap.parse_args()

    schedules = [Schedule("linear"), Schedule("tanh_like", args.steepness)]
    table = schedule_comparison(range(args.n_min, args.n_max + 1), schedules, args.target)
    print(f"{'n':>2} {'schedule':<16} {'tau_needed':>11} success")
    for r in table:
        print(f"{r.n:>2} {r.schedule:<16} {r.tau_needed:>11.3f} {r.success:.4f}")
    for s in schedules:
        ratios = growth_ratios(table, s.schedule_id)
        print(s.schedule_id, " ".join(f"n={n}:{v:.3f}" for n, v in sorted(ratios.items())))


if __name__ == "__main__":
    main()
