"""Command-line entry point: ``aqcls <command> --config PATH [--seed N ...] [--out DIR]``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .errors import ConfigError, SimulationError, ValidationError
from .evolution import EvolutionSpec, Schedule, evolve
from .grover import TABLE_COLUMNS, growth_ratios, schedule_comparison
from .hamiltonians import build_problem_hamiltonian
from .markov import (
    GenerationContext,
    build_transition_matrix,
    check_convergence_hypotheses,
    estimate_generation_matrix,
    exact_generation_matrix,
    stationary_distribution,
    uniform_generation_matrix,
    variance_ladder,
)
from .records import append_record, learned_record
from .search import run_aqcls
from .spectral import adiabatic_time_bound, gap_profile, verify_bound

EXIT_OK, EXIT_CONFIG, EXIT_SIMULATION = 0, 2, 3
RESULTS_FILE = "results.jsonl"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _solve_one(cfg: ExperimentConfig, seed: int, out: str):
    prob = cfg.build_problem()
    family = cfg.build_family(prob.n_qubits)
    initial = cfg.build_initial(prob.n_qubits)
    schedule = cfg.build_schedule()
    result = run_aqcls(prob.objective, family, initial, schedule, cfg.aqcls_config(seed), cfg.run.steps)
    out = Path(out)
    result.write_trace(out / f"trace_seed{seed}.csv")
    record = learned_record(result, prob.problem_id, initial, schedule, family)
    append_record(out / RESULTS_FILE, record)
    return record


def cmd_solve(cfg: ExperimentConfig, out: Path, fmt: str) -> int:
    seeds = cfg.run.seeds
    if cfg.run.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.run.workers, len(seeds))) as pool:
            records = list(pool.map(_solve_one, [cfg] * len(seeds), seeds, [str(out)] * len(seeds)))
    else:
        records = [_solve_one(cfg, s, str(out)) for s in seeds]
    for r in records:
        print(f"seed {r.seed}: x*={r.x_star} f*={r.f_star:g} ground={r.ground_index} "
              f"iterations={r.iterations} tau={r.tau:g}")
    return EXIT_OK


def cmd_evolve(cfg: ExperimentConfig, out: Path, fmt: str) -> int:
    prob = cfg.build_problem()
    initial = cfg.build_initial(prob.n_qubits)
    if cfg.evolve.w is not None:
        h_p = build_problem_hamiltonian(cfg.build_family(prob.n_qubits), np.array(cfg.evolve.w))
    else:
        h_p = prob.hamiltonian
    spec = EvolutionSpec(initial.operator, h_p, cfg.build_schedule(), cfg.evolve.tau, cfg.evolve.steps)
    psi = evolve(spec, initial.ground)
    n = prob.n_qubits
    rows = [(x, format(x, f"0{n}b"), float(a.real), float(a.imag), float(abs(a) ** 2))
            for x, a in enumerate(psi.amplitudes)]
    header = ("index", "bits", "re", "im", "probability")
    if fmt == "csv":
        _write_csv(out / "evolve.csv", header, rows)
    else:
        _write_json(out / "evolve.json", {"tau": spec.tau, "steps": spec.n_steps,
                                          "schedule": spec.schedule.schedule_id,
                                          "amplitudes": [dict(zip(header, r)) for r in rows]})
    print(f"tau={spec.tau:g} steps={spec.n_steps} argmax={int(np.argmax(psi.probabilities()))}")
    return EXIT_OK


def _profile(cfg: ExperimentConfig):
    prob = cfg.build_problem()
    initial = cfg.build_initial(prob.n_qubits)
    return initial, prob, gap_profile(initial, prob.hamiltonian, cfg.analysis.grid_points)


def cmd_gap(cfg: ExperimentConfig, out: Path, fmt: str) -> int:
    _, _, prof = _profile(cfg)
    if fmt == "csv":
        prof.to_csv(out / "gap.csv")
    else:
        _write_json(out / "gap.json", prof.to_dict())
    print(f"lambda_min={prof.lambda_min!r} at s={prof.s_at_min:g}")
    return EXIT_OK


def cmd_bound(cfg: ExperimentConfig, out: Path, fmt: str) -> int:
    a = cfg.analysis
    initial, prob, prof = _profile(cfg)
    if a.verify:
        report = verify_bound(initial, prob.hamiltonian, a.epsilon, a.grid_points, a.gap_mode).to_dict()
    else:
        report = {"tau_min": adiabatic_time_bound(prof, a.epsilon, a.gap_mode), "epsilon": a.epsilon,
                  "lambda_min": prof.lambda_min}
    report["gap_mode"] = a.gap_mode
    if fmt == "csv":
        keys = sorted(report)
        _write_csv(out / "bound.csv", keys, [[report[k] for k in keys]])
    else:
        _write_json(out / "bound.json", report)
    print(f"tau_min={report['tau_min']!r}")
    return EXIT_OK


def cmd_chain(cfg: ExperimentConfig, out: Path, fmt: str, seed: int) -> int:
    c, s = cfg.chain, cfg.search
    prob = cfg.build_problem()
    ctx = GenerationContext(cfg.build_initial(prob.n_qubits), cfg.build_family(prob.n_qubits),
                            cfg.build_schedule(), s.q, steps=cfg.run.steps)

    def generate(sigma2, stream):
        if c.generation == "uniform":
            return uniform_generation_matrix(prob.dim, sigma2)
        if c.generation == "exact":
            a = exact_generation_matrix(ctx, c.tau)
            return dataclasses.replace(a, sigma2=sigma2)
        return estimate_generation_matrix(ctx, sigma2, c.tau, c.trials, rng=stream)

    a = generate(c.sigma2, [seed, 0])
    m = build_transition_matrix(a, prob.objective, c.sigma2, s.sigma2_max, c.rule)
    pi = stationary_distribution(m)
    ladder = [generate(float(v), [seed, k + 1])
              for k, v in enumerate(variance_ladder(s.sigma2_max, s.eta, max(2, c.levels)))]
    delta = 1.0 / prob.dim if c.generation == "uniform" else ctx.delta_bound()
    report = check_convergence_hypotheses(ladder, delta)

    a.to_csv(out / "generation.csv")
    m.to_csv(out / "transition.csv")
    minima = prob.argmin().tolist()
    if fmt == "csv":
        _write_csv(out / "stationary.csv", ("state", "f", "pi"),
                   [(x, float(prob.objective[x]), float(p)) for x, p in enumerate(pi.pi)])
    else:
        _write_json(out / "stationary.json", {"pi": pi.pi.tolist(), "residual": pi.residual,
                                              "sigma2": c.sigma2, "temperature": m.temperature,
                                              "mass_on_minima": pi.mass_on(minima)})
    (out / "hypotheses.json").write_text(report.to_json() + "\n")
    print(f"mass on argmin {minima}: {pi.mass_on(minima):.6g}; hypotheses "
          f"{'hold' if report.passed else 'violated'}")
    return EXIT_OK


def cmd_grover_schedules(cfg: ExperimentConfig, out: Path, fmt: str) -> int:
    g = cfg.grover_schedules
    schedules = [Schedule(k, g.steepness) for k in g.schedules]
    table = schedule_comparison(range(g.n_min, g.n_max + 1), schedules, g.target, g.tau_max, g.rtol)
    if fmt == "csv":
        _write_csv(out / "grover_schedules.csv", TABLE_COLUMNS, [r.row() for r in table])
    else:
        _write_json(out / "grover_schedules.json", {
            "target": g.target,
            "rows": [dict(zip(TABLE_COLUMNS, r.row())) for r in table],
            "growth_ratios": {s.schedule_id: growth_ratios(table, s.schedule_id) for s in schedules},
        })
    for r in table:
        mark = " (censored)" if r.censored else ""
        print(f"n={r.n} {r.schedule:<16} tau={r.tau_needed:.6g}{mark}")
    return EXIT_OK


COMMANDS = ("solve", "evolve", "gap", "bound", "chain", "grover-schedules")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqcls", description="Adiabatic quantum search with learned Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="experiment config file")
        p.add_argument("--seed", action="append", type=int, help="seed (repeatable); overrides [run] seeds")
        p.add_argument("--out", type=Path, help="output directory; overrides [run] out")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed:
            cfg = dataclasses.replace(cfg, run=dataclasses.replace(cfg.run, seeds=tuple(args.seed)))
        out = args.out if args.out is not None else Path(cfg.base_dir or ".") / cfg.run.out
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "solve":
            return cmd_solve(cfg, out, args.format)
        if args.command == "chain":
            return cmd_chain(cfg, out, args.format, cfg.run.seeds[0])
        handler = {"evolve": cmd_evolve, "gap": cmd_gap, "bound": cmd_bound,
                   "grover-schedules": cmd_grover_schedules}[args.command]
        return handler(cfg, out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, ArithmeticError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
