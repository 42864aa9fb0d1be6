"""Objective tables: explicit tables, QUBO coefficients and the Grover needle."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .hamiltonians import grover_problem_hamiltonian
from .quantum import HermitianOperator, check_dim, check_qubits


@dataclass(frozen=True, eq=False)
class Problem:
    objective: np.ndarray
    n_qubits: int
    problem_id: str
    hamiltonian: HermitianOperator

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    def argmin(self) -> np.ndarray:
        f = self.objective
        return np.flatnonzero(f == f.min())


def _qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim != 2**n:
        raise ValidationError(f"objective table length {dim} is not a power of two")
    return check_qubits(n)


def grover_objective(n_qubits: int, target: int) -> np.ndarray:
    d = 2 ** check_qubits(n_qubits)
    if not 0 <= target < d:
        raise ValidationError(f"target {target} out of range for {n_qubits} qubits")
    f = np.ones(d)
    f[target] = 0.0
    return f


def grover_problem(n_qubits: int, target: int) -> Problem:
    return Problem(grover_objective(n_qubits, target), n_qubits, f"grover-n{n_qubits}-x{target}",
                   grover_problem_hamiltonian(n_qubits, target))


def table_problem(values, problem_id: str = "table") -> Problem:
    f = np.asarray(values, dtype=float)
    if f.ndim != 1 or not np.all(np.isfinite(f)):
        raise ValidationError("objective table must be a finite 1-d sequence")
    check_dim(f.shape[0])
    n = _qubits_for(f.shape[0])
    return Problem(f, n, problem_id, HermitianOperator(np.diag(f)))


def read_table(path) -> np.ndarray:
    """Read ``index,value`` rows (optional header); every index 0..D-1 exactly once."""
    entries = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                idx, val = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header
                raise ValidationError(f"{path}:{lineno}: expected 'index,value'") from None
            if idx in entries:
                raise ValidationError(f"{path}:{lineno}: duplicate index {idx}")
            entries[idx] = val
    d = len(entries)
    if sorted(entries) != list(range(d)):
        raise ValidationError(f"{path}: indices must cover 0..{d - 1}")
    return np.array([entries[i] for i in range(d)])


def qubo_objective(coefficients, n_qubits: int) -> np.ndarray:
    """``f(x) = sum_(i,j) Q_ij b_i b_j`` over bit strings ``b`` of each basis index."""
    n = check_qubits(n_qubits)
    idx = np.arange(2**n)
    bits = ((idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(float)
    f = np.zeros(2**n)
    for i, j, v in coefficients:
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"QUBO term ({i}, {j}) outside {n} variables")
        f += v * bits[:, i] * bits[:, j]
    return f


def read_qubo(path):
    """``i,j,value`` rows; diagonal terms are linear coefficients."""
    terms = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                terms.append((int(row[0]), int(row[1]), float(row[2])))
            except (ValueError, IndexError):
                if lineno == 1:
                    continue
                raise ValidationError(f"{path}:{lineno}: expected 'i,j,value'") from None
    return terms


def qubo_problem(coefficients, n_qubits: int, problem_id: str = "qubo") -> Problem:
    f = qubo_objective(coefficients, n_qubits)
    return Problem(f, n_qubits, problem_id, HermitianOperator(np.diag(f)))


def resolve(path, base_dir) -> Path:
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return p
