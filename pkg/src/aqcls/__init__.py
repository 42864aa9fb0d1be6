"""Adiabatic quantum computation with learned problem Hamiltonians.

A dense state-vector simulator of adiabatic evolution, the gap analysis
behind its run-time bound, and a hybrid search that learns a problem
Hamiltonian whose ground state minimizes a given objective.
"""
from .errors import (
    AqclsError,
    CapacityError,
    ConfigError,
    GapClosureError,
    ReducibleChainError,
    SimulationError,
    ValidationError,
)
from .evolution import EvolutionSpec, Schedule, evolve, generate_candidate
from .hamiltonians import (
    InitialHamiltonian,
    ProblemFamily,
    TabuHamiltonian,
    build_problem_hamiltonian,
    grover_initial,
    transverse_field_initial,
)
from .quantum import HermitianOperator, StateVector, ground_state
from .search import AqclsConfig, AqclsResult, run_aqcls
from .spectral import adiabatic_time_bound, gap_profile, verify_bound

__version__ = "0.1.0"
