"""Initial Hamiltonians, parametrized problem-Hamiltonian families and tabu penalties."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import ValidationError
from .quantum import (
    SIGMA_X,
    HermitianOperator,
    StateVector,
    as_operator,
    check_dim,
    check_qubits,
    eigendecompose,
    single_qubit_op,
    uniform_superposition,
    z_signs,
)

FAMILY_KINDS = ("diagonal", "ising")
MIN_GROUND_WEIGHT = 1e-12


@dataclass(frozen=True)
class ProblemFamily:
    """Affine map ``w -> H_P(w) = sum_k w_k T_k`` onto diagonal operators.

    ``diagonal``: one free energy per basis state (``T_k = |k><k|``).
    ``ising``: local fields on every vertex then one coupling per edge, i.e.
    ``sum_i w_i Z_i + sum_(i,j) w_ij Z_i Z_j``.
    """

    kind: str
    dim: int
    n_vertices: int = 0
    edges: tuple = ()
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValidationError(f"family kind must be one of {FAMILY_KINDS}, got {self.kind!r}")
        check_dim(self.dim)
        if self.kind == "ising":
            n = check_qubits(self.n_vertices)
            if self.dim != 2**n:
                raise ValidationError("ising family dimension must be 2**n_vertices")
            edges = tuple(tuple(sorted((int(i), int(j)))) for i, j in self.edges)
            for i, j in edges:
                if i == j or not (0 <= i < n and 0 <= j < n):
                    raise ValidationError(f"invalid edge ({i}, {j}) for {n} vertices")
            if len(set(edges)) != len(edges):
                raise ValidationError("duplicate edges in ising family")
            object.__setattr__(self, "edges", edges)
        if (self.lower is None) != (self.upper is None):
            raise ValidationError("box bounds need both lower and upper")
        if self.lower is not None and not self.lower < self.upper:
            raise ValidationError("box bounds need lower < upper")

    @classmethod
    def diagonal(cls, dim: int, bounds=None) -> "ProblemFamily":
        lo, hi = bounds if bounds is not None else (None, None)
        return cls("diagonal", dim, lower=lo, upper=hi)

    @classmethod
    def ising(cls, n_vertices: int, edges=None, bounds=None) -> "ProblemFamily":
        if edges is None:
            edges = tuple(combinations(range(n_vertices), 2))
        lo, hi = bounds if bounds is not None else (None, None)
        return cls("ising", 2**n_vertices, n_vertices=n_vertices, edges=tuple(edges), lower=lo, upper=hi)

    @property
    def parameter_dim(self) -> int:
        if self.kind == "diagonal":
            return self.dim
        return self.n_vertices + len(self.edges)

    @property
    def bounded(self) -> bool:
        return self.lower is not None

    @property
    def bounds(self):
        return (self.lower, self.upper) if self.bounded else None

    def terms(self) -> np.ndarray:
        """Diagonals of the basis operators ``T_k``, shape (parameter_dim, dim)."""
        if self.kind == "diagonal":
            return np.eye(self.dim)
        z = z_signs(self.n_vertices)
        rows = [z[i] for i in range(self.n_vertices)]
        rows += [z[i] * z[j] for i, j in self.edges]
        return np.array(rows)

    def lipschitz_constant(self) -> float:
        """L with ||H(w) - H(w')|| <= L ||w - w'||_inf (sum of term norms)."""
        return float(np.abs(self.terms()).max(axis=1).sum())

    def clip(self, w: np.ndarray) -> np.ndarray:
        if not self.bounded:
            return w
        return np.clip(w, self.lower, self.upper)

    def diagonal_of(self, w) -> np.ndarray:
        return np.asarray(w, dtype=float) @ self.terms()

    def anchor(self, x: int) -> np.ndarray:
        """A parameter vector whose problem Hamiltonian has ``x`` as unique ground state."""
        if not 0 <= x < self.dim:
            raise ValidationError(f"basis index {x} out of range")
        if self.kind == "diagonal":
            w = np.zeros(self.dim)
            w[x] = -1.0
        else:
            w = np.zeros(self.parameter_dim)
            w[: self.n_vertices] = -z_signs(self.n_vertices)[:, x]
        return self.clip(w)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "n_vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "bounds": list(self.bounds) if self.bounded else None,
        }

    @property
    def family_id(self) -> str:
        if self.kind == "diagonal":
            return f"diagonal-{self.dim}"
        edges = ",".join(f"{i}-{j}" for i, j in self.edges)
        return f"ising-{self.n_vertices}[{edges}]"


def build_problem_hamiltonian(family: ProblemFamily, w) -> HermitianOperator:
    w = np.asarray(w, dtype=float)
    if w.shape != (family.parameter_dim,):
        raise ValidationError(f"expected {family.parameter_dim} parameters, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("parameters must be finite")
    if family.bounded and (np.any(w < family.lower) or np.any(w > family.upper)):
        raise ValidationError(f"parameters outside box [{family.lower}, {family.upper}]")
    return HermitianOperator(np.diag(family.diagonal_of(w)))


@dataclass(frozen=True, eq=False)
class InitialHamiltonian:
    operator: HermitianOperator
    ground: StateVector
    gap_at_start: float
    name: str = "custom"

    def __post_init__(self):
        h = as_operator(self.operator)
        object.__setattr__(self, "operator", h)
        psi = np.asarray(self.ground)
        if psi.shape[0] != h.dim:
            raise ValidationError("ground state dimension does not match operator")
        e0 = float(eigendecompose(h).eigenvalues[0])
        residual = np.linalg.norm(h.matrix @ psi - e0 * psi)
        if residual > 1e-8:
            raise ValidationError(f"ground is not a minimum-energy eigenvector (residual {residual:.3g})")
        if np.min(np.abs(psi) ** 2) < MIN_GROUND_WEIGHT:
            raise ValidationError("initial ground state must overlap every basis state")

    @property
    def dim(self) -> int:
        return self.operator.dim

    def weights(self) -> np.ndarray:
        """Born weights |b_x|^2 of the initial ground state."""
        return self.ground.probabilities()


def transverse_field_initial(n_qubits: int) -> InitialHamiltonian:
    n = check_qubits(n_qubits)
    h = -sum(single_qubit_op(SIGMA_X, i, n) for i in range(n))
    return InitialHamiltonian(HermitianOperator(h), uniform_superposition(n), 2.0, "transverse")


def grover_initial(n_qubits: int) -> InitialHamiltonian:
    phi = uniform_superposition(n_qubits)
    v = phi.amplitudes.real
    h = np.eye(phi.dim) - np.outer(v, v)
    return InitialHamiltonian(HermitianOperator(h), phi, 1.0, "grover")


def initial_hamiltonian(kind: str, n_qubits: int) -> InitialHamiltonian:
    if kind == "transverse":
        return transverse_field_initial(n_qubits)
    if kind == "grover":
        return grover_initial(n_qubits)
    raise ValidationError(f"unknown initial Hamiltonian {kind!r}")


def grover_problem_hamiltonian(n_qubits: int, target: int) -> HermitianOperator:
    d = 2 ** check_qubits(n_qubits)
    if not 0 <= target < d:
        raise ValidationError(f"target {target} out of range for {n_qubits} qubits")
    diag = np.ones(d)
    diag[target] = 0.0
    return HermitianOperator(np.diag(diag))


@dataclass(frozen=True)
class TabuHamiltonian:
    """Multiset of penalized basis states, unit penalty each (repetitions allowed)."""

    dim: int
    penalized: tuple = field(default=())

    def __post_init__(self):
        check_dim(self.dim)
        pen = tuple(int(x) for x in self.penalized)
        for x in pen:
            if not 0 <= x < self.dim:
                raise ValidationError(f"tabu index {x} out of range for dimension {self.dim}")
        object.__setattr__(self, "penalized", pen)

    def counts(self) -> np.ndarray:
        return np.bincount(np.array(self.penalized, dtype=int), minlength=self.dim).astype(float)

    def operator(self) -> HermitianOperator:
        return HermitianOperator(np.diag(self.counts()))

    @property
    def size(self) -> int:
        return len(self.penalized)

    def multiplicity(self, x: int) -> int:
        return self.penalized.count(x)


def tabu_add(tabu: TabuHamiltonian, x: int) -> TabuHamiltonian:
    if not 0 <= x < tabu.dim:
        raise ValidationError(f"tabu index {x} out of range for dimension {tabu.dim}")
    return TabuHamiltonian(tabu.dim, tabu.penalized + (int(x),))


def effective_problem_hamiltonian(h_p, tabu: TabuHamiltonian) -> HermitianOperator:
    h_p = as_operator(h_p)
    if h_p.dim != tabu.dim:
        raise ValidationError(f"dimension mismatch: {h_p.dim} vs tabu {tabu.dim}")
    if tabu.size == 0:
        return h_p
    m = np.array(h_p.matrix, copy=True)
    m[np.diag_indices(tabu.dim)] += tabu.counts()
    return HermitianOperator(m)
