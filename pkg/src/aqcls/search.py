"""Hybrid quantum-classical search that learns a problem Hamiltonian.

Candidates come from the adiabatic generator driven by a problem Hamiltonian
whose parameters are drawn around the best-so-far parameters; acceptance is
a simulated-annealing rule in which the proposal variance plays the role of
temperature, and visited inferior states are penalized through a growing tabu
Hamiltonian.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError
from .evolution import Schedule, generate_candidate
from .hamiltonians import (
    InitialHamiltonian,
    ProblemFamily,
    TabuHamiltonian,
    build_problem_hamiltonian,
    effective_problem_hamiltonian,
    tabu_add,
)
from .quantum import HermitianOperator

TRACE_COLUMNS = (
    "i", "sigma2", "tau", "branch", "x_candidate", "f_candidate",
    "accepted", "x_star", "f_star", "d", "e", "tabu_size",
)


@dataclass(frozen=True)
class AqclsConfig:
    t_min: float = 1.0
    nu: float = 1.0
    w0: Optional[tuple] = None
    sigma2_max: float = 1.0
    eta: float = 0.1
    n_level: int = 10
    q: float = 0.9
    n_max: int = 50
    i_max: int = 1000
    seed: int = 0
    # Optional evolution-time growth tau <- h(tau) replacing tau + nu.
    growth: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        checks = [
            (self.t_min > 0, "t_min must be > 0"),
            (self.nu >= 0, "nu must be >= 0"),
            (self.sigma2_max > 0, "sigma2_max must be > 0"),
            (0 < self.eta < 1, "eta must be in (0,1)"),
            (self.n_level >= 1, "n_level must be >= 1"),
            (0 <= self.q < 1, "q must be in [0,1)"),
            (self.n_max >= 1, "n_max must be >= 1"),
            (self.i_max >= 1, "i_max must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValidationError(msg)
        if self.w0 is not None:
            object.__setattr__(self, "w0", tuple(float(v) for v in self.w0))

    def initial_parameters(self, family: ProblemFamily) -> np.ndarray:
        if self.w0 is None:
            return np.zeros(family.parameter_dim)
        w0 = np.array(self.w0)
        if w0.shape != (family.parameter_dim,):
            raise ValidationError(f"w0 has {w0.size} entries, family expects {family.parameter_dim}")
        return w0

    def sigma2_at(self, level: int) -> float:
        return self.sigma2_max * (1.0 - self.eta) ** level

    def tau_at(self, level: int) -> float:
        if self.growth is None:
            return self.t_min + level * self.nu
        tau = self.t_min
        for _ in range(level):
            tau = self.growth(tau)
        return tau


def sample_parameters(w_star, sigma2: float, rng: np.random.Generator, bounds=None) -> np.ndarray:
    """Isotropic Gaussian draw with mean ``w_star`` and covariance ``sigma2 * I``, clipped to ``bounds``."""
    if sigma2 < 0:
        raise ValidationError("sigma2 must be >= 0")
    w_star = np.asarray(w_star, dtype=float)
    w = w_star + math.sqrt(sigma2) * rng.standard_normal(w_star.shape)
    if bounds is not None:
        w = np.clip(w, bounds[0], bounds[1])
    return w


def acceptance_probability(f_new: float, f_star: float, sigma2: float, sigma2_max: float) -> float:
    """1 for an improvement, else ``(sigma2 / sigma2_max) ** (f_new - f_star)``."""
    if f_new < f_star:
        return 1.0
    delta = f_new - f_star
    if delta == 0:
        return 1.0
    return float((sigma2 / sigma2_max) ** delta)


def temperature_of_variance(sigma2: float, sigma2_max: float) -> float:
    """Annealing temperature matched to a variance: ``T = -1 / ln(sigma2 / sigma2_max)``."""
    if sigma2 <= 0:
        raise ValidationError("sigma2 must be > 0")
    if sigma2 > sigma2_max:
        raise ValidationError("sigma2 must not exceed sigma2_max")
    r = sigma2 / sigma2_max
    if r == 1.0:
        return math.inf
    return -1.0 / math.log(r)


@dataclass
class SearchState:
    x_star: int
    f_star: float
    w_star: np.ndarray
    sigma2: float
    tau: float
    tabu: TabuHamiltonian
    d: int = 0
    e: int = 0
    i: int = 0
    level: int = 0


@dataclass(frozen=True)
class TraceRecord:
    i: int
    sigma2: float
    tau: float
    branch: str
    x_candidate: int
    f_candidate: float
    accepted: int
    x_star: int
    f_star: float
    d: int
    e: int
    tabu_size: int
    f_best: float
    event: str

    def csv_row(self):
        return [
            str(self.i), repr(self.sigma2), repr(self.tau), self.branch, str(self.x_candidate),
            repr(self.f_candidate), str(self.accepted), str(self.x_star), repr(self.f_star),
            str(self.d), str(self.e), str(self.tabu_size),
        ]


@dataclass(frozen=True, eq=False)
class AqclsResult:
    H_P: HermitianOperator
    tau: float
    x_star: int
    f_star: float
    w_star: np.ndarray
    tabu: TabuHamiltonian
    trace: tuple
    seed: int
    init: dict

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def best_f(self) -> float:
        return min(self.init["f1"], self.init["f2"], *(r.f_best for r in self.trace))

    def write_trace(self, path):
        write_trace(self.trace, path)


def write_trace(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for rec in trace:
            w.writerow(rec.csv_row())


def _initial_draw(family: ProblemFamily, config: AqclsConfig, w0: np.ndarray, rng) -> np.ndarray:
    if family.bounded:
        return rng.uniform(family.lower, family.upper, size=family.parameter_dim)
    return sample_parameters(w0, config.sigma2_max, rng)


def update_state(st: SearchState, x: int, fx: float, w: np.ndarray, sigma2_max: float, rng) -> tuple:
    """Apply one candidate ``x`` (generated from parameters ``w``) to the search state.

    Returns ``(accepted, event)`` with event in better/suboptimal/rejected/repeat.
    """
    if x == st.x_star:
        st.e += 1
        return 0, "repeat"
    if fx < st.f_star:
        previous = st.x_star
        st.x_star, st.f_star, st.w_star = x, fx, w
        st.tabu = tabu_add(st.tabu, previous)
        return 1, "better"
    st.d += 1
    if rng.random() < acceptance_probability(fx, st.f_star, st.sigma2, sigma2_max):
        st.x_star, st.f_star, st.w_star = x, fx, w
        return 1, "suboptimal"
    return 0, "rejected"


def run_aqcls(objective, family: ProblemFamily, initial: InitialHamiltonian, schedule: Schedule,
              config: AqclsConfig, steps: Optional[int] = None) -> AqclsResult:
    """Run the search once with the seed in ``config``.

    ``objective`` is the table ``f(x)`` over basis indices.  Returns the learned
    Hamiltonian ``H_P(w*) + H_tabu``, the final evolution time and ``x*``,
    plus a per-iteration trace.
    """
    f = np.asarray(objective, dtype=float)
    if f.shape != (initial.dim,) or family.dim != initial.dim:
        raise ValidationError(
            f"objective over {f.size} states, family dimension {family.dim}, H_I dimension {initial.dim}"
        )
    rng = np.random.default_rng(config.seed)
    w0 = config.initial_parameters(family)
    tau = config.t_min
    empty = TabuHamiltonian(initial.dim)

    # Two unpenalized evolutions at t_min seed x*, w* and the tabu set.
    w1 = _initial_draw(family, config, w0, rng)
    w2 = _initial_draw(family, config, w0, rng)
    x1, _ = generate_candidate(initial, build_problem_hamiltonian(family, w1), schedule, tau, 1.0, rng, steps)
    x2, _ = generate_candidate(initial, build_problem_hamiltonian(family, w2), schedule, tau, 1.0, rng, steps)
    if f[x2] < f[x1]:
        best, worst = (x2, w2), (x1, w1)
    else:
        best, worst = (x1, w1), (x2, w2)
    tabu = empty if best[0] == worst[0] else tabu_add(empty, worst[0])
    st = SearchState(best[0], float(f[best[0]]), best[1], config.sigma2_max, tau, tabu)
    init = {"w1": w1.tolist(), "w2": w2.tolist(), "x1": x1, "x2": x2, "f1": float(f[x1]), "f2": float(f[x2])}
    f_best = st.f_star

    trace = []
    while True:
        if st.i % config.n_level == 0:
            st.level += 1
            st.sigma2 = config.sigma2_at(st.level)
            st.tau = config.tau_at(st.level)
        w = sample_parameters(st.w_star, st.sigma2, rng, family.bounds)
        h_eff = effective_problem_hamiltonian(build_problem_hamiltonian(family, w), st.tabu)
        x, branch = generate_candidate(initial, h_eff, schedule, st.tau, config.q, rng, steps)
        fx = float(f[x])
        accepted, event = update_state(st, x, fx, w, config.sigma2_max, rng)
        f_best = min(f_best, st.f_star)
        trace.append(TraceRecord(
            st.i, st.sigma2, st.tau, branch, x, fx, accepted, st.x_star, st.f_star,
            st.d, st.e, st.tabu.size, f_best, event,
        ))
        st.i += 1
        if st.i == config.i_max or st.d + st.e >= config.n_max:
            break

    h_final = effective_problem_hamiltonian(build_problem_hamiltonian(family, st.w_star), st.tabu)
    return AqclsResult(h_final, st.tau, st.x_star, st.f_star, np.array(st.w_star), st.tabu,
                       tuple(trace), config.seed, init)
