"""Experiment configuration: INI-style sections of ``key = value`` lines.

Example::

    [problem]
    kind = grover
    n_qubits = 3
    target = 5

    [search]
    q = 0.9
    eta = 0.1

Every section and key is optional; omitted keys take the documented
defaults (search: q=0.9, eta=0.1, n_level=10, sigma2_max=1, t_min=1, nu=1,
n_max=50, i_max=1000).  Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, ValidationError
from .evolution import SCHEDULE_KINDS, Schedule
from .hamiltonians import FAMILY_KINDS, ProblemFamily, initial_hamiltonian
from .problems import (
    Problem,
    grover_problem,
    qubo_problem,
    read_qubo,
    read_table,
    resolve,
    table_problem,
)
from .search import AqclsConfig


def _floats(text):
    return tuple(float(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _ints(text):
    return tuple(int(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _edges(text):
    out = []
    for tok in re.split(r"[,\s]+", text.strip()):
        if tok:
            a, b = tok.split("-")
            out.append((int(a), int(b)))
    return tuple(out)


def _words(text):
    return tuple(v for v in re.split(r"[,\s]+", text.strip()) if v)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{a}-{b}" for a, b in value)
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def _conv(fn):
    return {"conv": fn}


@dataclass(frozen=True)
class ProblemSection:
    kind: str = "grover"
    n_qubits: Optional[int] = field(default=None, metadata=_conv(int))
    target: int = field(default=0, metadata=_conv(int))
    table: Optional[str] = None
    values: Optional[tuple] = field(default=None, metadata=_conv(_floats))
    qubo: Optional[str] = None
    id: Optional[str] = None


@dataclass(frozen=True)
class FamilySection:
    kind: str = "diagonal"
    edges: Optional[tuple] = field(default=None, metadata=_conv(_edges))
    lower: Optional[float] = field(default=None, metadata=_conv(float))
    upper: Optional[float] = field(default=None, metadata=_conv(float))


@dataclass(frozen=True)
class InitialSection:
    kind: str = "transverse"


@dataclass(frozen=True)
class ScheduleSection:
    kind: str = "linear"
    steepness: float = field(default=3.0, metadata=_conv(float))


@dataclass(frozen=True)
class SearchSection:
    t_min: float = field(default=1.0, metadata=_conv(float))
    nu: float = field(default=1.0, metadata=_conv(float))
    w0: Optional[tuple] = field(default=None, metadata=_conv(_floats))
    sigma2_max: float = field(default=1.0, metadata=_conv(float))
    eta: float = field(default=0.1, metadata=_conv(float))
    n_level: int = field(default=10, metadata=_conv(int))
    q: float = field(default=0.9, metadata=_conv(float))
    n_max: int = field(default=50, metadata=_conv(int))
    i_max: int = field(default=1000, metadata=_conv(int))


@dataclass(frozen=True)
class RunSection:
    seeds: tuple = field(default=(0,), metadata=_conv(_ints))
    out: str = "out"
    workers: int = field(default=1, metadata=_conv(int))
    steps: Optional[int] = field(default=None, metadata=_conv(int))


@dataclass(frozen=True)
class EvolveSection:
    tau: float = field(default=10.0, metadata=_conv(float))
    steps: Optional[int] = field(default=None, metadata=_conv(int))
    w: Optional[tuple] = field(default=None, metadata=_conv(_floats))


@dataclass(frozen=True)
class AnalysisSection:
    grid_points: int = field(default=512, metadata=_conv(int))
    epsilon: float = field(default=0.1, metadata=_conv(float))
    gap_mode: str = "min"
    verify: bool = field(default=False, metadata=_conv(_bool))


@dataclass(frozen=True)
class ChainSection:
    generation: str = "exact"
    sigma2: float = field(default=0.5, metadata=_conv(float))
    tau: float = field(default=1.0, metadata=_conv(float))
    trials: int = field(default=10000, metadata=_conv(int))
    rule: str = "eq10"
    levels: int = field(default=3, metadata=_conv(int))


@dataclass(frozen=True)
class GroverSchedulesSection:
    n_min: int = field(default=1, metadata=_conv(int))
    n_max: int = field(default=5, metadata=_conv(int))
    target: float = field(default=0.9, metadata=_conv(float))
    schedules: tuple = field(default=("linear", "tanh_like"), metadata=_conv(_words))
    steepness: float = field(default=3.0, metadata=_conv(float))
    tau_max: float = field(default=1.0e4, metadata=_conv(float))
    rtol: float = field(default=1.0e-4, metadata=_conv(float))


SECTIONS = {
    "problem": ProblemSection,
    "family": FamilySection,
    "initial": InitialSection,
    "schedule": ScheduleSection,
    "search": SearchSection,
    "run": RunSection,
    "evolve": EvolveSection,
    "analysis": AnalysisSection,
    "chain": ChainSection,
    "grover_schedules": GroverSchedulesSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Optional[ProblemSection] = None  # only grover-schedules runs without one
    family: FamilySection = FamilySection()
    initial: InitialSection = InitialSection()
    schedule: ScheduleSection = ScheduleSection()
    search: SearchSection = SearchSection()
    run: RunSection = RunSection()
    evolve: EvolveSection = EvolveSection()
    analysis: AnalysisSection = AnalysisSection()
    chain: ChainSection = ChainSection()
    grover_schedules: GroverSchedulesSection = GroverSchedulesSection()
    base_dir: Optional[str] = field(default=None, compare=False)

    # -- builders ---------------------------------------------------------
    def build_problem(self) -> Problem:
        p = self.problem
        if p is None:
            raise ConfigError("a [problem] section is required for this command", field="problem")
        if p.kind == "grover":
            prob = grover_problem(p.n_qubits, p.target)
        elif p.kind == "table":
            values = p.values if p.values is not None else read_table(resolve(p.table, self.base_dir))
            prob = table_problem(values, p.id or "table")
        else:
            prob = qubo_problem(read_qubo(resolve(p.qubo, self.base_dir)), p.n_qubits, p.id or "qubo")
        if p.id:
            prob = dataclasses.replace(prob, problem_id=p.id)
        return prob

    def build_family(self, n_qubits: int) -> ProblemFamily:
        fs = self.family
        bounds = (fs.lower, fs.upper) if fs.lower is not None else None
        if fs.kind == "diagonal":
            return ProblemFamily.diagonal(2**n_qubits, bounds)
        return ProblemFamily.ising(n_qubits, fs.edges, bounds)

    def build_initial(self, n_qubits: int):
        return initial_hamiltonian(self.initial.kind, n_qubits)

    def build_schedule(self) -> Schedule:
        return Schedule(self.schedule.kind, self.schedule.steepness)

    def aqcls_config(self, seed: int = 0) -> AqclsConfig:
        s = self.search
        return AqclsConfig(
            t_min=s.t_min, nu=s.nu, w0=s.w0, sigma2_max=s.sigma2_max, eta=s.eta,
            n_level=s.n_level, q=s.q, n_max=s.n_max, i_max=s.i_max, seed=seed,
        )


def _locate(lines, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if key is not None and current == section:
            k = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
            if k == key:
                return no
    return None


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    """Parse and validate a configuration document.

    Raises :class:`ConfigError` carrying the offending line number for syntax
    problems, or the ``section.key`` field name for invalid values.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",), empty_lines_in_values=False)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section] header", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("expected 'key = value'", line=lineno) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigError(exc.message.split(":")[-1].strip() if hasattr(exc, "message") else str(exc),
                          line=exc.lineno) from None
    lines = text.splitlines()

    sections = {}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]", line=_locate(lines, name))
        cls = SECTIONS[name]
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in parser[name].items():
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in [{name}]", line=_locate(lines, name, key))
            conv = known[key].metadata.get("conv", str)
            try:
                kwargs[key] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"invalid value {raw!r} ({exc})", field=f"{name}.{key}") from None
        sections[name] = cls(**kwargs)
    cfg = ExperimentConfig(**sections, base_dir=None if base_dir is None else str(base_dir))
    validate_config(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", field=str(path)) from None
    return parse_config(text, base_dir=path.parent)


def _require(cond: bool, field_name: str, message: str):
    if not cond:
        raise ConfigError(message, field=field_name)


def _validate_problem(cfg: ExperimentConfig):
    p = cfg.problem
    _require(p.kind in ("grover", "table", "qubo"), "problem.kind", "must be grover, table or qubo")
    if p.kind in ("grover", "qubo"):
        _require(p.n_qubits is not None, "problem.n_qubits", f"required for kind = {p.kind}")
    if p.kind == "table":
        _require((p.table is None) != (p.values is None), "problem.table", "give exactly one of table or values")
        if p.table is not None:
            _require(resolve(p.table, cfg.base_dir).is_file(), "problem.table", f"file not found: {p.table}")
    if p.kind == "qubo":
        _require(p.qubo is not None, "problem.qubo", "required for kind = qubo")
        _require(resolve(p.qubo, cfg.base_dir).is_file(), "problem.qubo", f"file not found: {p.qubo}")


def validate_config(cfg: ExperimentConfig):
    if cfg.problem is not None:
        _validate_problem(cfg)
    _require(cfg.family.kind in FAMILY_KINDS, "family.kind", f"must be one of {FAMILY_KINDS}")
    _require(cfg.initial.kind in ("transverse", "grover"), "initial.kind", "must be transverse or grover")
    _require(cfg.schedule.kind in SCHEDULE_KINDS, "schedule.kind", f"must be one of {SCHEDULE_KINDS}")
    _require(cfg.analysis.gap_mode in ("min", "pointwise"), "analysis.gap_mode", "must be min or pointwise")
    _require(0 < cfg.analysis.epsilon < 1, "analysis.epsilon", "must be in (0,1)")
    _require(cfg.chain.generation in ("exact", "monte_carlo", "uniform"), "chain.generation",
             "must be exact, monte_carlo or uniform")
    _require(cfg.chain.rule in ("eq10", "metropolis"), "chain.rule", "must be eq10 or metropolis")
    _require(cfg.run.workers >= 1, "run.workers", "must be >= 1")
    gs = cfg.grover_schedules
    _require(1 <= gs.n_min <= gs.n_max <= 6, "grover_schedules.n_max", "need 1 <= n_min <= n_max <= 6")
    _require(0 < gs.target < 1, "grover_schedules.target", "must be in (0,1)")
    for kind in gs.schedules:
        _require(kind in SCHEDULE_KINDS, "grover_schedules.schedules", f"unknown schedule {kind!r}")

    try:
        cfg.aqcls_config()
    except ValidationError as exc:
        key = str(exc).split()[0]
        raise ConfigError(str(exc), field=f"search.{key}") from None
    if cfg.problem is None:
        return
    try:
        cfg.build_schedule()
        prob = cfg.build_problem()
        family = cfg.build_family(prob.n_qubits)
        cfg.build_initial(prob.n_qubits)
        cfg.aqcls_config().initial_parameters(family)
    except ValidationError as exc:
        raise ConfigError(str(exc), field="problem") from None


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render every field explicitly; ``parse_config`` of the result equals ``cfg``."""
    out = []
    for name in SECTIONS:
        section = getattr(cfg, name)
        if section is None:
            continue
        out.append(f"[{name}]")
        for f in dataclasses.fields(section):
            value = getattr(section, f.name)
            if value is None:
                continue
            out.append(f"{f.name} = {_fmt(value)}")
        out.append("")
    return "\n".join(out)
