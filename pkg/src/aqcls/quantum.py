"""Dense state-vector substrate: states, Hermitian operators, spectra, measurement.

Units: hbar = 1, so energies and inverse times share a scale.  Basis index
``x`` of an ``n``-qubit register is big-endian, i.e. qubit 0 is the most
significant bit and ``sigma_z`` on qubit ``i`` has eigenvalue ``+1`` when bit
``i`` of ``x`` is 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError

MAX_QUBITS = 12
MAX_DIM = 2**MAX_QUBITS

HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-10
MEASURE_NORM_ATOL = 1e-6

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def check_qubits(n_qubits: int, cap: int = MAX_QUBITS) -> int:
    n = int(n_qubits)
    if n != n_qubits or n < 1:
        raise ValidationError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds the cap of {cap} (dimension {2**cap})")
    return n


def check_dim(dim: int, cap: int = MAX_DIM) -> int:
    if dim < 2:
        raise ValidationError(f"dimension must be >= 2, got {dim}")
    if dim > cap:
        raise CapacityError(f"dimension {dim} exceeds the cap of {cap}")
    return dim


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over the computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValidationError("amplitudes must be a 1-d vector")
        check_dim(amps.shape[0])
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes contain non-finite values")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise ValidationError("cannot normalize a zero or non-finite vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        if not 0 <= index < dim:
            raise ValidationError(f"basis index {index} out of range for dimension {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.dim


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense self-adjoint matrix.  Real input stays real (faster eigensolvers)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if not (np.issubdtype(m.dtype, np.floating) or np.issubdtype(m.dtype, np.complexfloating)):
            m = m.astype(float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"operator must be a square matrix, got shape {m.shape}")
        check_dim(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise ValidationError("operator contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m))))
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITIAN_ATOL * scale):
            raise ValidationError("operator is not Hermitian")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    def norm(self) -> float:
        """Operator (spectral) norm."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()

    def is_diagonal(self, atol: float = 0.0) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.all(np.abs(off) <= atol))

    def expectation(self, state) -> float:
        psi = np.asarray(state, dtype=complex)
        return float(np.vdot(psi, self.matrix @ psi).real)

    def __add__(self, other):
        other = as_operator(other)
        _same_dim(self, other)
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other):
        other = as_operator(other)
        _same_dim(self, other)
        return HermitianOperator(self.matrix - other.matrix)

    def __mul__(self, c):
        return HermitianOperator(float(c) * self.matrix)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_operator(h) -> HermitianOperator:
    if isinstance(h, HermitianOperator):
        return h
    return HermitianOperator(np.asarray(h))


def as_state(psi) -> StateVector:
    if isinstance(psi, StateVector):
        return psi
    return StateVector(np.asarray(psi))


def _same_dim(a: HermitianOperator, b: HermitianOperator):
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigendecompose(h) -> EigenSystem:
    """Ascending spectrum and orthonormal eigenvectors (columns) of ``h``."""
    h = as_operator(h)
    evals, evecs = np.linalg.eigh(h.matrix)
    return EigenSystem(_frozen(evals), _frozen(evecs))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # Deterministic gauge: largest-magnitude component real and positive.
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def ground_state(h, degeneracy_tol: float = 1e-9):
    """Return ``(energy, state, degenerate)`` for the lowest eigenvalue of ``h``.

    When the two lowest levels are within ``degeneracy_tol`` the returned
    vector is whichever ground vector the eigensolver produced and
    ``degenerate`` is set; callers decide what that means for them.
    """
    es = eigendecompose(h)
    e = es.eigenvalues
    degenerate = bool(e[1] - e[0] <= degeneracy_tol)
    vec = _fix_phase(np.asarray(es.eigenvectors[:, 0], dtype=complex))
    return float(e[0]), StateVector.normalized(vec), degenerate


def measure_computational(state, rng: np.random.Generator) -> int:
    """Born-rule sample of a basis index."""
    psi = np.asarray(state, dtype=complex)
    p = np.abs(psi) ** 2
    total = p.sum()
    if abs(total - 1.0) > MEASURE_NORM_ATOL:
        raise ValidationError(f"cannot measure an unnormalized state (|psi|^2 = {total!r})")
    return int(rng.choice(p.shape[0], p=p / total))


def uniform_superposition(n_qubits: int) -> StateVector:
    n = check_qubits(n_qubits)
    d = 2**n
    return StateVector(np.full(d, 1.0 / np.sqrt(d), dtype=complex))


def commutator_norm(a, b) -> float:
    a, b = as_operator(a), as_operator(b)
    _same_dim(a, b)
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.linalg.norm(c, 2))


def overlap(a, b) -> float:
    """|<a|b>|."""
    return float(abs(np.vdot(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))))


def phase_distance(psi, phi) -> float:
    """min over global phase of ||psi - e^{i theta} phi|| = sqrt(2 - 2|<phi|psi>|)."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap(psi, phi))))


def single_qubit_op(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Embed a 2x2 operator on ``qubit`` of an ``n_qubits`` register."""
    if not 0 <= qubit < n_qubits:
        raise ValidationError(f"qubit {qubit} out of range for {n_qubits} qubits")
    out = np.ones((1, 1))
    for k in range(n_qubits):
        out = np.kron(out, op if k == qubit else np.eye(2))
    return out


def z_signs(n_qubits: int) -> np.ndarray:
    """Row ``i`` holds the sigma_z eigenvalue of qubit ``i`` for every basis index."""
    idx = np.arange(2**n_qubits)
    bits = (idx[None, :] >> (n_qubits - 1 - np.arange(n_qubits))[:, None]) & 1
    return 1.0 - 2.0 * bits
