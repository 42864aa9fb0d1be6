"""Generation matrices, neighborhood graphs and stationary laws of the search chain.

The classical half of the search is a simulated-annealing chain whose
proposal matrix ``A(sigma2)`` comes from the quantum generator.  This module
estimates ``A`` (by Monte Carlo replay or exactly for frozen parameters),
classifies its neighborhood graph, assembles the transition matrix under the
variance acceptance rule and computes stationary distributions.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ReducibleChainError, SimulationError, ValidationError
from .evolution import Schedule, default_steps, outcome_distribution, propagate
from .hamiltonians import (
    InitialHamiltonian,
    ProblemFamily,
    TabuHamiltonian,
    build_problem_hamiltonian,
    effective_problem_hamiltonian,
)
from .search import acceptance_probability, temperature_of_variance

_SUB_BATCH = 2048


@dataclass(frozen=True, eq=False)
class GenerationMatrix:
    entries: np.ndarray
    sigma2: float
    trials: Optional[int] = None  # None for exact matrices

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("generation matrix must be square")
        if np.any(a < 0):
            raise ValidationError("generation matrix has negative entries")
        tol = 1e-9 if self.trials is None else 1e-3
        if np.max(np.abs(a.sum(axis=1) - 1.0)) > tol:
            raise ValidationError("generation matrix rows must sum to 1")
        object.__setattr__(self, "entries", a)

    @property
    def exact(self) -> bool:
        return self.trials is None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def stderr(self) -> np.ndarray:
        """Binomial standard error of each entry (zeros when exact)."""
        if self.exact:
            return np.zeros_like(self.entries)
        a = self.entries
        return np.sqrt(a * (1.0 - a) / self.trials)

    def to_csv(self, path):
        write_matrix_csv(self.entries, path)


@dataclass(frozen=True, eq=False)
class GenerationContext:
    """Everything needed to replay the candidate-generation step from a current solution.

    ``anchors[i]`` is the parameter vector ``w*`` associated with current
    solution ``x_i``; by default the family's anchor making ``x_i`` its
    unique ground state.
    """

    initial: InitialHamiltonian
    family: ProblemFamily
    schedule: Schedule
    q: float
    anchors: Optional[np.ndarray] = None
    tabu: Optional[TabuHamiltonian] = None
    steps: Optional[int] = None

    def __post_init__(self):
        if self.family.dim != self.initial.dim:
            raise ValidationError("family and initial Hamiltonian dimensions differ")
        if not 0.0 <= self.q <= 1.0:
            raise ValidationError("q must be a probability")
        anchors = self.anchors
        if anchors is None:
            anchors = np.array([self.family.anchor(x) for x in range(self.family.dim)])
        anchors = np.asarray(anchors, dtype=float)
        if anchors.shape != (self.family.dim, self.family.parameter_dim):
            raise ValidationError(f"anchors must have shape {(self.family.dim, self.family.parameter_dim)}")
        object.__setattr__(self, "anchors", anchors)
        if self.tabu is None:
            object.__setattr__(self, "tabu", TabuHamiltonian(self.family.dim))

    @property
    def dim(self) -> int:
        return self.family.dim

    def delta_bound(self) -> float:
        """Lower bound on every generation probability: ``(1 - q) min_x |b_x|^2``."""
        return (1.0 - self.q) * float(np.min(self.initial.weights()))


def _row_streams(rng, n):
    if isinstance(rng, np.random.Generator):
        return rng.spawn(n)
    return [np.random.default_rng(s) for s in np.random.SeedSequence(rng).spawn(n)]


def _sample_rows(p: np.ndarray, rng) -> np.ndarray:
    cdf = np.cumsum(p, axis=1)
    cdf /= cdf[:, -1:]
    u = rng.random(p.shape[0])
    return np.minimum((cdf < u[:, None]).sum(axis=1), p.shape[1] - 1)


def estimate_generation_matrix(ctx: GenerationContext, sigma2: float, tau: float, trials: int,
                               rng=0) -> GenerationMatrix:
    """Monte Carlo estimate of ``a_ij``: frequency of proposing ``x_j`` from current ``x_i``.

    Each row uses its own independent stream spawned from ``rng``.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if sigma2 < 0:
        raise ValidationError("sigma2 must be >= 0")
    d = ctx.dim
    terms = ctx.family.terms()
    tabu_diag = ctx.tabu.counts()
    h_i = ctx.initial.operator.matrix
    psi0 = ctx.initial.ground.amplitudes
    weights = ctx.initial.weights()
    counts = np.zeros((d, d))
    for i, row_rng in enumerate(_row_streams(rng, d)):
        evolve_mask = row_rng.random(trials) < ctx.q
        n_meas = int(trials - evolve_mask.sum())
        counts[i] += np.bincount(row_rng.choice(d, size=n_meas, p=weights), minlength=d)
        n_ev = trials - n_meas
        if sigma2 == 0.0 and n_ev:
            # Frozen parameters: one evolution serves every trial of the row.
            diag = ctx.family.clip(ctx.anchors[i]) @ terms + tabu_diag
            steps = ctx.steps or default_steps(tau, max(ctx.initial.operator.norm(), float(np.abs(diag).max())))
            p = np.abs(propagate(h_i, np.diag(diag), ctx.schedule, tau, psi0, steps)) ** 2
            counts[i] += np.bincount(row_rng.choice(d, size=n_ev, p=p / p.sum()), minlength=d)
            continue
        for start in range(0, n_ev, _SUB_BATCH):
            b = min(_SUB_BATCH, n_ev - start)
            w = ctx.anchors[i] + math.sqrt(sigma2) * row_rng.standard_normal((b, terms.shape[0]))
            w = ctx.family.clip(w)
            diag = w @ terms + tabu_diag
            h_p = np.zeros((b, d, d))
            h_p[:, np.arange(d), np.arange(d)] = diag
            steps = ctx.steps or default_steps(tau, max(ctx.initial.operator.norm(), float(np.abs(diag).max())))
            psi = propagate(h_i, h_p, ctx.schedule, tau, psi0, steps)
            counts[i] += np.bincount(_sample_rows(np.abs(psi) ** 2, row_rng), minlength=d)
    return GenerationMatrix(counts / trials, sigma2, trials)


def exact_generation_matrix(ctx: GenerationContext, tau: float) -> GenerationMatrix:
    """Frozen-parameter (``sigma2 = 0``) generation matrix from simulated final states."""
    rows = []
    for i in range(ctx.dim):
        h = effective_problem_hamiltonian(build_problem_hamiltonian(ctx.family, ctx.anchors[i]), ctx.tabu)
        rows.append(outcome_distribution(ctx.initial, h, ctx.schedule, tau, ctx.q, ctx.steps))
    return GenerationMatrix(np.array(rows), 0.0)


def uniform_generation_matrix(dim: int, sigma2: float = 1.0) -> GenerationMatrix:
    return GenerationMatrix(np.full((dim, dim), 1.0 / dim), sigma2)


GRAPH_KINDS = ("complete", "strongly_connected", "neither")


@dataclass(frozen=True, eq=False)
class NeighborhoodGraph:
    adjacency: np.ndarray  # adjacency[i, j]: edge x_i -> x_j, diagonal excluded
    kind: str

    @property
    def edges(self):
        return [tuple(map(int, e)) for e in np.argwhere(self.adjacency)]

    @property
    def strongly_connected(self) -> bool:
        return self.kind != "neither"


def _off_diagonal_support(a: np.ndarray, zero_tol: float) -> np.ndarray:
    adj = a > zero_tol
    np.fill_diagonal(adj, False)
    return adj


def _is_strongly_connected(adj: np.ndarray) -> bool:
    n, _ = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    return n == 1


def neighborhood_graph(a, zero_tol: float = 0.0) -> NeighborhoodGraph:
    """Directed graph of strictly positive proposal probabilities and its class."""
    m = a.entries if isinstance(a, GenerationMatrix) else np.asarray(a, dtype=float)
    adj = _off_diagonal_support(m, zero_tol)
    off = ~np.eye(m.shape[0], dtype=bool)
    if np.all(adj[off]):
        kind = "complete"
    elif _is_strongly_connected(adj):
        kind = "strongly_connected"
    else:
        kind = "neither"
    return NeighborhoodGraph(adj, kind)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    entries: np.ndarray
    sigma2: float
    temperature: float
    rule: str

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_csv(self, path):
        write_matrix_csv(self.entries, path)


def acceptance_matrix(f, sigma2: float, sigma2_max: float, rule: str = "eq10") -> np.ndarray:
    """``P[i, j]``: probability of accepting proposal ``x_j`` from current ``x_i``."""
    f = np.asarray(f, dtype=float)
    d = f.shape[0]
    p = np.ones((d, d))
    if rule == "eq10":
        for i in range(d):
            for j in range(d):
                p[i, j] = acceptance_probability(f[j], f[i], sigma2, sigma2_max)
    elif rule == "metropolis":
        t = temperature_of_variance(sigma2, sigma2_max)
        delta = f[None, :] - f[:, None]
        if math.isfinite(t):
            p = np.where(delta > 0, np.exp(-np.maximum(delta, 0.0) / t), 1.0)
    else:
        raise ValidationError(f"rule must be 'eq10' or 'metropolis', got {rule!r}")
    return p


def build_transition_matrix(a, f, sigma2: float, sigma2_max: float, rule: str = "eq10") -> TransitionMatrix:
    """``m_ij = a_ij * P(accept x_j | x_i)`` off the diagonal; rejected mass stays on ``m_ii``."""
    am = a.entries if isinstance(a, GenerationMatrix) else np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float)
    if f.shape != (am.shape[0],):
        raise ValidationError("objective table does not match the generation matrix")
    if np.max(np.abs(am.sum(axis=1) - 1.0)) > 1e-3:
        raise ValidationError("generation matrix is not row-stochastic")
    m = am * acceptance_matrix(f, sigma2, sigma2_max, rule)
    np.fill_diagonal(m, 0.0)
    diag = 1.0 - m.sum(axis=1)
    assert np.all(diag >= -1e-12), "acceptance rule produced negative holding probability"
    m[np.diag_indices_from(m)] = np.maximum(diag, 0.0)
    return TransitionMatrix(m, sigma2, temperature_of_variance(sigma2, sigma2_max), rule)


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    pi: np.ndarray
    residual: float
    iterations: int

    def mass_on(self, states) -> float:
        return float(np.sum(self.pi[list(states)]))


def stationary_distribution(m, tol: float = 1e-13, max_squarings: int = 200) -> StationaryDistribution:
    """Unique ``pi`` with ``pi M = pi`` for an irreducible row-stochastic ``M``.

    Power iteration on the lazy chain ``(I + M) / 2`` (same stationary law,
    aperiodic), with the iteration operator squared after every step so that
    slowly mixing low-temperature chains converge in a few dozen rounds.
    """
    mm = m.entries if isinstance(m, TransitionMatrix) else np.asarray(m, dtype=float)
    if np.any(mm < -1e-15) or np.max(np.abs(mm.sum(axis=1) - 1.0)) > 1e-9:
        raise ValidationError("transition matrix must be row-stochastic")
    if not _is_strongly_connected(_off_diagonal_support(mm, 0.0)):
        raise ReducibleChainError("chain is reducible; stationary distribution is not unique")
    d = mm.shape[0]
    op = 0.5 * (np.eye(d) + mm)
    pi = np.full(d, 1.0 / d)
    residual = math.inf
    for k in range(1, max_squarings + 1):
        pi = pi @ op
        pi = np.maximum(pi, 0.0)
        pi /= pi.sum()
        residual = float(np.abs(pi @ mm - pi).sum())
        if residual <= tol:
            return StationaryDistribution(pi, residual, k)
        op = op @ op
        op /= op.sum(axis=1, keepdims=True)
    if residual <= 1e-8:
        return StationaryDistribution(pi, residual, max_squarings)
    raise SimulationError(f"power iteration did not converge (residual {residual:.3g})")


@dataclass
class HypothesisCheck:
    passed: bool
    witness: Optional[list] = None
    detail: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    combinatorial_symmetry: HypothesisCheck
    delta_bound: HypothesisCheck
    constant_graph: HypothesisCheck
    levels: list

    @property
    def passed(self) -> bool:
        return self.combinatorial_symmetry.passed and self.delta_bound.passed and self.constant_graph.passed

    def to_dict(self) -> dict:
        out = {"levels": self.levels, "passed": self.passed}
        for name in ("combinatorial_symmetry", "delta_bound", "constant_graph"):
            h = getattr(self, name)
            out[name] = {"passed": h.passed, "witness": h.witness, **h.detail}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def check_convergence_hypotheses(matrices: Sequence[GenerationMatrix], delta_expected: float,
                                 z: float = 3.0, zero_tol: float = 0.0) -> ConvergenceReport:
    """Check the three sufficient conditions for concentration on global minima.

    1. combinatorial symmetry: ``a_ij > 0 <=> a_ji > 0`` at every level;
    2. every positive off-diagonal entry is at least ``delta_expected``, up to
       ``z`` binomial standard errors for Monte Carlo matrices;
    3. the neighborhood graph is the same at every level.
    """
    if len(matrices) < 2:
        raise ValidationError("need at least two variance levels")
    supports = [_off_diagonal_support(a.entries, zero_tol) for a in matrices]

    sym = HypothesisCheck(True)
    for lvl, adj in enumerate(supports):
        bad = np.argwhere(adj != adj.T)
        if bad.size:
            i, j = map(int, bad[0])
            if not adj[i, j]:
                i, j = j, i
            sym = HypothesisCheck(False, [lvl, i, j], {"message": f"a[{i},{j}] > 0 but a[{j},{i}] = 0"})
            break

    observed = min(
        (float(a.entries[adj].min()) for a, adj in zip(matrices, supports) if adj.any()), default=0.0
    )
    delta = HypothesisCheck(delta_expected > 0, None, {"delta_expected": delta_expected, "observed_min": observed})
    if delta_expected <= 0:
        delta.detail["message"] = "no positive lower bound available (q = 1)"
    else:
        for lvl, (a, adj) in enumerate(zip(matrices, supports)):
            margin = 0.0 if a.exact else z * math.sqrt(delta_expected * (1 - delta_expected) / a.trials)
            low = adj & (a.entries < delta_expected - margin)
            if low.any():
                i, j = map(int, np.argwhere(low)[0])
                delta = HypothesisCheck(False, [lvl, i, j], {
                    "delta_expected": delta_expected, "observed_min": observed,
                    "message": f"a[{i},{j}] = {a.entries[i, j]:.4g} below {delta_expected - margin:.4g}",
                })
                break

    const = HypothesisCheck(True)
    for lvl in range(1, len(supports)):
        diff = np.argwhere(supports[lvl] != supports[0])
        if diff.size:
            i, j = map(int, diff[0])
            const = HypothesisCheck(False, [lvl, i, j], {"message": f"edge ({i},{j}) differs from level 0"})
            break

    return ConvergenceReport(sym, delta, const, [float(a.sigma2) for a in matrices])


def variance_ladder(sigma2_max: float, eta: float, levels: int) -> np.ndarray:
    """``sigma2_k = sigma2_max (1 - eta)^k`` for ``k = 1..levels``."""
    return sigma2_max * (1.0 - eta) ** np.arange(1, levels + 1)


def temperature_ladder(sigma2_max: float, eta: float, levels: int) -> np.ndarray:
    return np.array([temperature_of_variance(s, sigma2_max) for s in variance_ladder(sigma2_max, eta, levels)])


def levels_to_temperature(eta: float, t_target: float) -> int:
    """Smallest level count whose annealing temperature is at most ``t_target``."""
    if not 0 < eta < 1 or t_target <= 0:
        raise ValidationError("need 0 < eta < 1 and t_target > 0")
    return int(math.ceil((-1.0 / t_target) / math.log(1.0 - eta)))


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def ladder_stationary(a, f, sigma2_max: float, eta: float, levels: int, rule: str = "eq10"):
    """Stationary laws along the variance ladder for a fixed generation matrix.

    Returns a list of ``(r_k, pi_k)`` with ``r_k = (1 - eta)^k``.
    """
    out = []
    for s2 in variance_ladder(sigma2_max, eta, levels):
        m = build_transition_matrix(a, f, s2, sigma2_max, rule)
        out.append((s2 / sigma2_max, stationary_distribution(m).pi))
    return out


def write_matrix_csv(m: np.ndarray, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row"] + [f"col{j}" for j in range(m.shape[1])])
        for i, row in enumerate(m):
            w.writerow([i] + [repr(float(v)) for v in row])
