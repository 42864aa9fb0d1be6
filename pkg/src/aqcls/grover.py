"""Adiabatic Grover search: minimal run time per schedule.

For each register size the search walks ``tau`` up geometrically until the
success probability ``|<x|psi(tau)>|^2`` first reaches the target, then
bisects inside the last bracket.  Success probability oscillates weakly in
``tau`` so "minimal" means the first crossing on that geometric walk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ValidationError
from .evolution import EvolutionSpec, Schedule, evolve
from .hamiltonians import grover_initial, grover_problem_hamiltonian
from .quantum import check_qubits

GROVER_MAX_QUBITS = 6
TABLE_COLUMNS = ("n", "schedule", "tau_needed", "censored", "success")


def grover_success(n_qubits: int, target: int, schedule: Schedule, tau: float,
                   steps: Optional[int] = None) -> float:
    init = grover_initial(n_qubits)
    spec = EvolutionSpec(init.operator, grover_problem_hamiltonian(n_qubits, target), schedule, tau, steps)
    return float(evolve(spec, init.ground).probabilities()[target])


@dataclass(frozen=True)
class TauSearch:
    n: int
    schedule: str
    tau_needed: float
    censored: bool
    success: float

    def row(self):
        return (self.n, self.schedule, self.tau_needed, self.censored, self.success)


def minimal_tau(n_qubits: int, schedule: Schedule, target_probability: float = 0.9, grover_target: int = 0,
                tau_start: float = 0.5, growth: float = 1.3, tau_max: float = 1e4, rtol: float = 1e-4) -> TauSearch:
    if not 0.0 < target_probability < 1.0:
        raise ValidationError("target probability must be in (0,1)")
    if growth <= 1.0:
        raise ValidationError("growth factor must exceed 1")
    check_qubits(n_qubits, GROVER_MAX_QUBITS)

    def p(tau):
        return grover_success(n_qubits, grover_target, schedule, tau)

    lo, hi = 0.0, tau_start
    p_hi = p(hi)
    while p_hi < target_probability:
        if hi > tau_max:
            return TauSearch(n_qubits, schedule.schedule_id, math.inf, True, p_hi)
        lo, hi = hi, hi * growth
        p_hi = p(hi)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        p_mid = p(mid)
        if p_mid >= target_probability:
            hi, p_hi = mid, p_mid
        else:
            lo = mid
    return TauSearch(n_qubits, schedule.schedule_id, hi, False, p_hi)


def schedule_comparison(n_values: Sequence[int], schedules: Sequence[Schedule], target_probability: float = 0.9,
                        tau_max: float = 1e4, rtol: float = 1e-4) -> list:
    return [minimal_tau(n, sch, target_probability, tau_max=tau_max, rtol=rtol)
            for n in n_values for sch in schedules]


def growth_ratios(table: Sequence[TauSearch], schedule_id: str) -> dict:
    """``tau(n) / tau(n-1)`` keyed by ``n`` for one schedule; censored entries are skipped."""
    taus = {r.n: r.tau_needed for r in table if r.schedule == schedule_id and not r.censored}
    return {n: taus[n] / taus[n - 1] for n in sorted(taus) if n - 1 in taus}
