"""Success rate of the hybrid search over many seeds, for one config file.

Counts runs returning a brute-force argmin and, among those, runs whose final
problem Hamiltonian (tabu included) has a non-degenerate ground state at x*.

    python scripts/aqcls_success_rates.py scripts/configs/grover3.ini --seeds 40
"""

import argparse
import time

import numpy as np

from aqcls.config import load_config
from aqcls.quantum import ground_state
from aqcls.search import run_aqcls


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--first-seed", type=int, default=0)
    args = ap.parse_args()

    cfg = load_config(args.config)
    prob = cfg.build_problem()
    f = prob.objective
    argmin = set(np.flatnonzero(f == f.min()).tolist())
    family = cfg.build_family(prob.n_qubits)
    initial = cfg.build_initial(prob.n_qubits)
    schedule = cfg.build_schedule()

    wins = grounded = 0
    start = time.perf_counter()
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        res = run_aqcls(f, family, initial, schedule, cfg.aqcls_config(seed), cfg.run.steps)
        _, psi, degenerate = ground_state(res.H_P)
        gi = int(np.argmax(psi.probabilities()))
        hit = res.x_star in argmin
        wins += hit
        grounded += hit and gi == res.x_star and not degenerate
        print(f"seed {seed}: x*={res.x_star} ground={gi} iterations={res.iterations}")
    print(f"{prob.problem_id}: argmin {wins}/{args.seeds}, ground at x* {grounded}/{wins}, "
          f"{time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
