"""Gap profiles along the linear interpolation path and the adiabatic run-time bound."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import GapClosureError, ValidationError
from .evolution import EvolutionSpec, Schedule, evolve
from .hamiltonians import InitialHamiltonian
from .quantum import as_operator, ground_state, phase_distance

DEFAULT_GRID = 512
DEGENERACY_TOL = 1e-9
PROFILE_COLUMNS = ("s", "E0", "E1", "gap", "dH_norm")


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    s: np.ndarray
    E0: np.ndarray
    E1: np.ndarray
    dH_norm: np.ndarray

    @property
    def gap(self) -> np.ndarray:
        return self.E1 - self.E0

    @property
    def lambda_min(self) -> float:
        return float(np.min(self.gap))

    @property
    def s_at_min(self) -> float:
        return float(self.s[int(np.argmin(self.gap))])

    def rows(self):
        gap = self.gap
        for k in range(self.s.shape[0]):
            yield (self.s[k], self.E0[k], self.E1[k], gap[k], self.dH_norm[k])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PROFILE_COLUMNS)
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])

    def to_dict(self) -> dict:
        d = {name: [float(v) for v in col] for name, col in zip(PROFILE_COLUMNS, zip(*self.rows()))}
        d["lambda_min"] = self.lambda_min
        return d


def _operator(h):
    return h.operator if isinstance(h, InitialHamiltonian) else as_operator(h)


def _two_lowest(a: np.ndarray, b: np.ndarray, s: np.ndarray):
    evals = np.linalg.eigvalsh((1.0 - s)[:, None, None] * a + s[:, None, None] * b)
    return evals[:, 0], evals[:, 1]


def gap_profile(h_i, h_p, grid_points: int = DEFAULT_GRID, degeneracy_tol: float = DEGENERACY_TOL,
                check: bool = True, refine: bool = True) -> SpectralProfile:
    """Two lowest levels of ``(1 - s) h_i + s h_p`` on a uniform grid in ``[0, 1]``.

    With ``refine`` the location of the smallest gap is polished by a bounded
    scalar minimization between the neighbours of the best grid point and the
    minimizer is inserted into the grid, so ``lambda_min`` is the true minimum
    of the path rather than a grid upper bound.

    Raises :class:`GapClosureError` if the gap falls to ``degeneracy_tol`` or
    below anywhere on the grid (unless ``check`` is false).
    """
    a, b = _operator(h_i), _operator(h_p)
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if grid_points < 2:
        raise ValidationError("grid_points must be >= 2")
    am, bm = a.matrix, b.matrix
    s = np.linspace(0.0, 1.0, grid_points)
    e0, e1 = _two_lowest(am, bm, s)
    if refine:
        k = int(np.argmin(e1 - e0))
        lo, hi = s[max(k - 1, 0)], s[min(k + 1, grid_points - 1)]

        def gap_at(x):
            l0, l1 = _two_lowest(am, bm, np.array([x]))
            return float(l1[0] - l0[0])

        opt = minimize_scalar(gap_at, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if opt.fun < e1[k] - e0[k] and not np.any(s == opt.x):
            j = int(np.searchsorted(s, opt.x))
            l0, l1 = _two_lowest(am, bm, np.array([opt.x]))
            s, e0, e1 = np.insert(s, j, opt.x), np.insert(e0, j, l0[0]), np.insert(e1, j, l1[0])
    dh = np.full(s.shape[0], (b - a).norm())
    prof = SpectralProfile(s, e0, e1, dh)
    if check and prof.lambda_min <= degeneracy_tol:
        raise GapClosureError(
            f"gap closes (min {prof.lambda_min:.3g}) at s = {prof.s_at_min:.4f}; adiabatic bound undefined"
        )
    return prof


def adiabatic_time_bound(profile: SpectralProfile, epsilon: float, gap: str = "min",
                         degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """Run time sufficient for final distance ``epsilon`` to the target ground state.

    Evaluates ``4/eps [ |H'(0)|/g(0)^2 + |H'(1)|/g(1)^2 + int (10 |H'|/g^3 + |H'|/g) ds ]``
    with the integral by the trapezoid rule on the profile grid.  In the
    integrand ``g`` is the minimum gap over the path (``gap="min"``) or the
    local gap ``g(s)`` (``gap="pointwise"``, a tighter variant).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    g = profile.gap
    if np.min(g) <= degeneracy_tol:
        raise GapClosureError(f"gap closes (min {np.min(g):.3g}); adiabatic bound undefined")
    dh = profile.dH_norm
    if gap == "min":
        lam = np.full_like(g, np.min(g))
    elif gap == "pointwise":
        lam = g
    else:
        raise ValidationError(f"gap mode must be 'min' or 'pointwise', got {gap!r}")
    ends = dh[0] / g[0] ** 2 + dh[-1] / g[-1] ** 2
    integral = np.trapezoid(10.0 * dh / lam**3 + dh / lam, profile.s)
    return float(4.0 / epsilon * (ends + integral))


@dataclass(frozen=True)
class BoundReport:
    tau_min: float
    achieved_distance: float
    epsilon: float
    lambda_min: float
    steps: int

    @property
    def satisfied(self) -> bool:
        return self.achieved_distance <= self.epsilon

    def to_dict(self) -> dict:
        return {
            "tau_min": self.tau_min,
            "achieved_distance": self.achieved_distance,
            "epsilon": self.epsilon,
            "lambda_min": self.lambda_min,
            "steps": self.steps,
            "satisfied": self.satisfied,
        }


def verify_bound(h_i, h_p, epsilon: float, grid_points: int = DEFAULT_GRID, gap: str = "min",
                 steps=None, psi0=None) -> BoundReport:
    """Evolve with the linear schedule for ``tau_min`` and measure the distance reached.

    Distance is to the ground state of ``h_p`` modulo a global phase.  ``psi0``
    defaults to the ground state of ``h_i`` (the stored one when ``h_i`` is an
    :class:`InitialHamiltonian`).
    """
    prof = gap_profile(h_i, h_p, grid_points)
    tau = adiabatic_time_bound(prof, epsilon, gap)
    if psi0 is None:
        psi0 = h_i.ground if isinstance(h_i, InitialHamiltonian) else ground_state(h_i)[1]
    spec = EvolutionSpec(_operator(h_i), _operator(h_p), Schedule("linear"), tau, steps)
    psi = evolve(spec, psi0)
    _, target, _ = ground_state(h_p)
    return BoundReport(tau, phase_distance(psi, target), epsilon, prof.lambda_min, spec.n_steps)

