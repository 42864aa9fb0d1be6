import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aqcls.errors import CapacityError, ValidationError
from aqcls.hamiltonians import (
    ProblemFamily,
    TabuHamiltonian,
    build_problem_hamiltonian,
    effective_problem_hamiltonian,
    grover_initial,
    grover_problem_hamiltonian,
    tabu_add,
    transverse_field_initial,
)
from aqcls.quantum import commutator_norm, ground_state

from oracles import ising_matrix, transverse_matrix

FAMILIES = [
    ProblemFamily.diagonal(4),
    ProblemFamily.diagonal(8),
    ProblemFamily.ising(2),
    ProblemFamily.ising(3),
    ProblemFamily.ising(3, edges=[(0, 1), (1, 2)]),
]


def params(family):
    return arrays(float, family.parameter_dim, elements=st.floats(-5, 5, allow_nan=False))


def test_ising_single_vertex_is_sigma_z():
    h = build_problem_hamiltonian(ProblemFamily.ising(1), [1.0])
    assert np.array_equal(h.matrix, np.diag([1.0, -1.0]))


def test_ising_single_coupling():
    h = build_problem_hamiltonian(ProblemFamily.ising(2), [0.0, 0.0, 1.0])
    assert np.array_equal(np.diag(h.matrix), [1.0, -1.0, -1.0, 1.0])


def test_ising_matches_kron_oracle():
    rng = np.random.default_rng(0)
    fam = ProblemFamily.ising(3)
    w = rng.normal(size=fam.parameter_dim)
    J = {e: w[3 + k] for k, e in enumerate(fam.edges)}
    assert np.allclose(build_problem_hamiltonian(fam, w).matrix, ising_matrix(w[:3], J, 3))


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.family_id)
def test_zero_parameters_give_zero_operator(family):
    assert np.all(build_problem_hamiltonian(family, np.zeros(family.parameter_dim)).matrix == 0)


def test_parameter_dim():
    assert ProblemFamily.ising(3).parameter_dim == 3 + 3
    assert ProblemFamily.ising(3, edges=[(0, 1)]).parameter_dim == 4
    assert ProblemFamily.diagonal(8).parameter_dim == 8


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.family_id)
def test_affinity(family):
    @settings(max_examples=25, deadline=None)
    @given(params(family), params(family))
    def check(w1, w2):
        b = lambda w: build_problem_hamiltonian(family, w).matrix
        assert np.allclose(b(w1) + b(w2) - b(np.zeros_like(w1)), b(w1 + w2), atol=1e-12, rtol=0)

    check()


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.family_id)
def test_lipschitz(family):
    @settings(max_examples=25, deadline=None)
    @given(params(family), params(family))
    def check(w1, w2):
        diff = build_problem_hamiltonian(family, w1).matrix - build_problem_hamiltonian(family, w2).matrix
        bound = family.lipschitz_constant() * np.max(np.abs(w1 - w2))
        assert np.linalg.norm(diff, 2) <= bound + 1e-9

    check()


def test_build_validation():
    fam = ProblemFamily.diagonal(4, bounds=(-1, 1))
    with pytest.raises(ValidationError):
        build_problem_hamiltonian(fam, np.zeros(3))
    with pytest.raises(ValidationError):
        build_problem_hamiltonian(fam, [0, 0, 0, 2.0])
    with pytest.raises(ValidationError):
        ProblemFamily.ising(2, edges=[(0, 0)])


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.family_id)
def test_anchor_has_unique_ground(family):
    for x in range(family.dim):
        _, psi, deg = ground_state(build_problem_hamiltonian(family, family.anchor(x)))
        assert not deg and np.argmax(np.abs(psi.amplitudes)) == x


@pytest.mark.parametrize("n", [1, 2, 3])
def test_transverse_initial(n):
    hi = transverse_field_initial(n)
    assert np.allclose(hi.operator.matrix, transverse_matrix(n))
    assert np.allclose(hi.ground.amplitudes, 2 ** (-n / 2))
    e = np.linalg.eigvalsh(hi.operator.matrix)
    assert e[1] - e[0] == pytest.approx(hi.gap_at_start) == pytest.approx(2.0)
    rng = np.random.default_rng(n)
    diag = rng.permutation(2**n).astype(float)
    assert commutator_norm(hi.operator, np.diag(diag)) > 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_grover_initial(n):
    gi = grover_initial(n)
    e = np.linalg.eigvalsh(gi.operator.matrix)
    assert e[0] == pytest.approx(0, abs=1e-12) and e[1] - e[0] == pytest.approx(1.0)
    assert gi.operator.expectation(gi.ground) == pytest.approx(0, abs=1e-12)
    if n == 1:
        assert np.allclose(e, [0, 1])


def test_capacity():
    with pytest.raises(CapacityError):
        transverse_field_initial(13)


def test_tabu_examples():
    empty = TabuHamiltonian(4)
    assert np.all(empty.operator().matrix == 0)
    once = tabu_add(empty, 1)
    assert np.array_equal(np.diag(once.operator().matrix), [0, 1, 0, 0])
    twice = tabu_add(once, 1)
    assert np.array_equal(np.diag(twice.operator().matrix), [0, 2, 0, 0])
    assert empty.size == 0  # immutability
    with pytest.raises(ValidationError):
        tabu_add(empty, 4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 7), max_size=20), st.integers(0, 7))
def test_tabu_monotone(history, x):
    tabu = TabuHamiltonian(8, tuple(history))
    before = tabu.counts()
    after = tabu_add(tabu, x).counts()
    assert np.all(after >= before)
    assert np.sum(after - before) == 1 and after[x] - before[x] == 1
    assert after[x] == tabu_add(tabu, x).multiplicity(x)


def test_effective_problem_hamiltonian():
    h = np.diag([0.0, 0.0])
    assert effective_problem_hamiltonian(h, TabuHamiltonian(2)).matrix.tolist() == h.tolist()
    flipped = effective_problem_hamiltonian(h, TabuHamiltonian(2, (0,)))
    assert np.array_equal(np.diag(flipped.matrix), [1.0, 0.0])
    assert np.argmax(np.abs(ground_state(flipped)[1].amplitudes)) == 1
    g = effective_problem_hamiltonian(grover_problem_hamiltonian(2, 3), TabuHamiltonian(4, (3,)))
    _, psi, deg = ground_state(g)
    assert deg
