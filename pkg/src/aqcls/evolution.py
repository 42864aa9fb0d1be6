"""Interpolation schedules and Schroedinger-equation integration.

The propagator splits ``[0, tau]`` into equal steps and applies the exact
exponential of the Hamiltonian frozen at each step midpoint, obtained from
its eigendecomposition.  Every factor is unitary to rounding error and the
scheme is second order in the step size.  Step unitaries are built in
vectorized chunks and multiplied pairwise, which keeps very long evolutions
(millions of steps on a few qubits) cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SimulationError, ValidationError
from .hamiltonians import InitialHamiltonian
from .quantum import HermitianOperator, StateVector, as_operator, as_state

SCHEDULE_KINDS = ("linear", "smoothstep", "tanh_like")
MIN_STEPS = 64
STEPS_PER_PHASE = 20.0
# Complex entries held in one chunk of step unitaries (about 32 MB).
_CHUNK_BUDGET = 2**21


@dataclass(frozen=True)
class Schedule:
    """Monotone map ``u = t / tau in [0, 1] -> s in [0, 1]`` with exact endpoints.

    ``tanh_like`` spends its time where the gap of a symmetric search
    problem is smallest: the elapsed fraction of time follows a hyperbolic
    tangent in ``s``, i.e. ``u(s) = [tanh(k(2s-1)) + tanh k] / (2 tanh k)``,
    and ``s(u)`` is its inverse.  Larger ``steepness`` slows the sweep near
    ``s = 1/2`` by a factor ``k / tanh k``.
    """

    kind: str = "linear"
    steepness: float = 3.0

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValidationError(f"schedule kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")
        if not self.steepness > 0:
            raise ValidationError("steepness must be > 0")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "linear":
            s = u.copy()
        elif self.kind == "smoothstep":
            s = 3.0 * u**2 - 2.0 * u**3
        else:
            k = self.steepness
            x = np.clip((2.0 * u - 1.0) * math.tanh(k), -1.0, 1.0)
            with np.errstate(divide="ignore"):
                s = 0.5 + np.arctanh(x) / (2.0 * k)
        s = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, s))
        return np.clip(s, 0.0, 1.0)

    @property
    def schedule_id(self) -> str:
        if self.kind == "tanh_like":
            return f"tanh_like(k={self.steepness:g})"
        return self.kind


def schedule_value(schedule: Schedule, t: float, tau: float) -> float:
    if not tau > 0:
        raise ValidationError("tau must be > 0")
    if not 0.0 <= t <= tau:
        raise ValidationError(f"t = {t} outside [0, tau = {tau}]")
    return float(schedule(t / tau))


def default_steps(tau: float, max_norm: float) -> int:
    """Keep the phase accumulated per step at or below 1/STEPS_PER_PHASE rad."""
    return max(MIN_STEPS, int(math.ceil(STEPS_PER_PHASE * tau * max_norm)))


@dataclass(frozen=True, eq=False)
class EvolutionSpec:
    h_i: HermitianOperator
    h_p: HermitianOperator
    schedule: Schedule
    tau: float
    steps: Optional[int] = None

    def __post_init__(self):
        h_i, h_p = as_operator(self.h_i), as_operator(self.h_p)
        if h_i.dim != h_p.dim:
            raise ValidationError(f"dimension mismatch: {h_i.dim} vs {h_p.dim}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValidationError("tau must be a finite positive time")
        if self.steps is not None and int(self.steps) < 1:
            raise ValidationError("steps must be >= 1")
        object.__setattr__(self, "h_i", h_i)
        object.__setattr__(self, "h_p", h_p)

    @property
    def n_steps(self) -> int:
        if self.steps is not None:
            return int(self.steps)
        return default_steps(self.tau, max(self.h_i.norm(), self.h_p.norm()))


def _stack_norms(h: np.ndarray) -> np.ndarray:
    return np.max(np.abs(np.linalg.eigvalsh(h)), axis=-1)


def _chain(u: np.ndarray) -> np.ndarray:
    # u[..., k, :, :] is step k; returns u[K-1] @ ... @ u[0].
    while u.shape[-3] > 1:
        n = u.shape[-3]
        paired = u[..., 1 : n - n % 2 : 2, :, :] @ u[..., 0 : n - n % 2 : 2, :, :]
        if n % 2:
            paired = np.concatenate([paired, u[..., n - 1 :, :, :]], axis=-3)
        u = paired
    return u[..., 0, :, :]


def propagate(h_i, h_p, schedule: Schedule, tau: float, psi0, steps: int) -> np.ndarray:
    """Raw propagation of ``psi0`` under ``(1 - s) h_i + s h_p``.

    ``h_p`` may be a single (D, D) matrix or a stack (B, D, D); the result has
    shape (D,) or (B, D) accordingly.  No renormalization is applied.
    """
    h_i = np.asarray(h_i)
    h_p = np.asarray(h_p)
    single = h_p.ndim == 2
    if single:
        h_p = h_p[None]
    n_batch, dim = h_p.shape[0], h_p.shape[-1]
    psi = np.broadcast_to(np.asarray(psi0, dtype=complex), (n_batch, dim)).copy()
    dt = tau / steps
    s_mid = schedule((np.arange(steps) + 0.5) / steps)
    real = not (np.iscomplexobj(h_i) or np.iscomplexobj(h_p))
    chunk = max(1, _CHUNK_BUDGET // (n_batch * dim * dim))
    for start in range(0, steps, chunk):
        s = s_mid[start : start + chunk][None, :, None, None]
        h = (1.0 - s) * h_i + s * h_p[:, None]
        evals, evecs = np.linalg.eigh(h)
        phases = np.exp(-1j * dt * evals)
        vh = np.swapaxes(evecs, -1, -2) if real else np.conj(np.swapaxes(evecs, -1, -2))
        u = (evecs * phases[..., None, :]) @ vh
        psi = np.einsum("bij,bj->bi", _chain(u), psi)
    if not np.all(np.isfinite(psi)):
        raise SimulationError("non-finite amplitudes during integration")
    return psi[0] if single else psi


def evolve_array(spec: EvolutionSpec, psi0) -> np.ndarray:
    psi0 = as_state(psi0)
    if psi0.dim != spec.h_i.dim:
        raise ValidationError(f"state dimension {psi0.dim} does not match operators ({spec.h_i.dim})")
    return propagate(spec.h_i.matrix, spec.h_p.matrix, spec.schedule, spec.tau, psi0.amplitudes, spec.n_steps)


def evolve(spec: EvolutionSpec, psi0) -> StateVector:
    """psi(tau) for ``i d/dt psi = H(t) psi``, ``H(t) = [1 - s(t)] H_I + s(t) H_P``."""
    psi = evolve_array(spec, psi0)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise SimulationError(f"norm drift {abs(norm - 1.0):.3g} exceeds 1e-8")
    return StateVector(psi / norm)


def evolved_probabilities(initial: InitialHamiltonian, h_p_eff, schedule: Schedule, tau: float,
                          steps: Optional[int] = None) -> np.ndarray:
    spec = EvolutionSpec(initial.operator, as_operator(h_p_eff), schedule, tau, steps)
    return evolve(spec, initial.ground).probabilities()


def outcome_distribution(initial: InitialHamiltonian, h_p_eff, schedule: Schedule, tau: float, q: float,
                         steps: Optional[int] = None) -> np.ndarray:
    """Exact law of :func:`generate_candidate`: ``(1 - q) |b_x|^2 + q |<x|psi(tau)>|^2``."""
    _check_q(q)
    p = (1.0 - q) * initial.weights()
    if q > 0:
        p = p + q * evolved_probabilities(initial, h_p_eff, schedule, tau, steps)
    return p / p.sum()


def _check_q(q: float):
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"q must be a probability, got {q}")


def generate_candidate(initial: InitialHamiltonian, h_p_eff, schedule: Schedule, tau: float, q: float,
                       rng: np.random.Generator, steps: Optional[int] = None):
    """One quantum generation step.

    With probability ``1 - q`` the prepared ground state of ``H_I`` is measured
    directly; otherwise it is first evolved towards ``h_p_eff``.  Returns
    ``(x, branch)`` with ``branch`` in ``{"measure", "evolve"}``.
    """
    _check_q(q)
    if rng.random() < q:
        p = evolved_probabilities(initial, h_p_eff, schedule, tau, steps)
        branch = "evolve"
    else:
        p = initial.weights()
        branch = "measure"
    return int(rng.choice(p.shape[0], p=p / p.sum())), branch
