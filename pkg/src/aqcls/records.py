"""Learned-algorithm records and the append-only results store."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from filelock import FileLock

from .quantum import ground_state
from .search import AqclsResult
from .spectral import gap_profile


@dataclass(frozen=True)
class LearnedAlgorithmRecord:
    """One learned adiabatic algorithm ``(H_I, s, H_P)`` plus run metadata."""

    objective_id: str
    h_i_id: str
    schedule_id: str
    family_id: str
    w_star: tuple
    tabu: tuple
    tau: float
    x_star: int
    f_star: float
    seed: int
    iterations: int
    ground_index: int
    ground_degenerate: bool
    min_gap: float
    best_f: Optional[float] = None

    def to_json(self) -> str:
        d = asdict(self)
        d["w_star"] = list(self.w_star)
        d["tabu"] = list(self.tabu)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LearnedAlgorithmRecord":
        d = json.loads(text)
        d["w_star"] = tuple(float(v) for v in d["w_star"])
        d["tabu"] = tuple(int(v) for v in d["tabu"])
        return cls(**d)


def learned_record(result: AqclsResult, objective_id: str, initial, schedule, family,
                   grid_points: int = 128) -> LearnedAlgorithmRecord:
    """Build a record, filling the verification fields by diagonalizing the returned ``H_P``."""
    _, psi, degenerate = ground_state(result.H_P)
    ground_index = int(np.argmax(np.abs(psi.amplitudes)))
    prof = gap_profile(initial, result.H_P, grid_points, check=False)
    return LearnedAlgorithmRecord(
        objective_id=objective_id,
        h_i_id=initial.name,
        schedule_id=schedule.schedule_id,
        family_id=family.family_id,
        w_star=tuple(float(v) for v in result.w_star),
        tabu=tuple(result.tabu.penalized),
        tau=float(result.tau),
        x_star=int(result.x_star),
        f_star=float(result.f_star),
        seed=int(result.seed),
        iterations=result.iterations,
        ground_index=ground_index,
        ground_degenerate=bool(degenerate),
        min_gap=max(0.0, prof.lambda_min),
        best_f=float(result.best_f),
    )


def append_record(path, record: LearnedAlgorithmRecord):
    """Append one JSON line under an exclusive lock so concurrent writers never interleave."""
    path = Path(path)
    with FileLock(str(path) + ".lock"):
        with open(path, "a") as fh:
            fh.write(record.to_json() + "\n")
            fh.flush()


def read_records(path) -> list:
    path = Path(path)
    if not path.exists():
        return []
    return [LearnedAlgorithmRecord.from_json(line) for line in path.read_text().splitlines() if line.strip()]
