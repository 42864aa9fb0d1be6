import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqcls.errors import ReducibleChainError, ValidationError
from aqcls.evolution import Schedule
from aqcls.hamiltonians import ProblemFamily, transverse_field_initial
from aqcls.markov import (
    GenerationContext,
    GenerationMatrix,
    acceptance_matrix,
    build_transition_matrix,
    check_convergence_hypotheses,
    estimate_generation_matrix,
    exact_generation_matrix,
    ladder_stationary,
    levels_to_temperature,
    neighborhood_graph,
    stationary_distribution,
    total_variation,
    uniform_generation_matrix,
    variance_ladder,
)

from oracles import eq10_transition_2, stationary_nullspace


def ctx(q=0.9, n=2, **kw):
    return GenerationContext(transverse_field_initial(n), ProblemFamily.diagonal(2**n), Schedule(), q, **kw)


def stochastic(rng, d, zeros=0.0):
    a = rng.random((d, d))
    a[rng.random((d, d)) < zeros] = 0.0
    np.fill_diagonal(a, a.diagonal() + 0.1)
    return a / a.sum(axis=1, keepdims=True)


def test_matrix_validation():
    with pytest.raises(ValidationError):
        GenerationMatrix(np.array([[0.5, 0.4], [0.5, 0.5]]), 1.0)
    with pytest.raises(ValidationError):
        GenerationMatrix(np.array([[1.2, -0.2], [0.5, 0.5]]), 1.0)


def test_q_zero_rows_are_initial_weights():
    a = estimate_generation_matrix(ctx(q=0.0), 0.5, 2.0, 4000, rng=1)
    sigma = math.sqrt(0.25 * 0.75 / 4000)
    assert np.all(np.abs(a.entries - 0.25) <= 3 * sigma)


def test_delta_floor_q09():
    a = estimate_generation_matrix(ctx(q=0.9), 0.5, 2.0, 10_000, rng=2)
    delta = 0.1 / 4
    margin = 3 * math.sqrt(delta * (1 - delta) / 10_000)
    assert np.all(a.entries >= delta - margin)
    assert neighborhood_graph(a).kind == "complete"


def test_zero_variance_rows_reproducible():
    c = ctx(q=0.9)
    a1 = estimate_generation_matrix(c, 0.0, 3.0, 5000, rng=3)
    a2 = estimate_generation_matrix(c, 0.0, 3.0, 5000, rng=4)
    for i in range(4):
        assert total_variation(a1.entries[i], a2.entries[i]) <= 0.05


def test_exact_matches_monte_carlo():
    c = ctx(q=0.7)
    exact = exact_generation_matrix(c, 2.5)
    mc = estimate_generation_matrix(c, 0.0, 2.5, 20_000, rng=5)
    se = np.sqrt(exact.entries * (1 - exact.entries) / 20_000)
    assert np.all(np.abs(mc.entries - exact.entries) <= 4 * se + 1e-12)
    assert np.allclose(exact.entries.sum(axis=1), 1, atol=1e-12)


def test_seeded_estimates_deterministic():
    c = ctx()
    a = estimate_generation_matrix(c, 0.3, 1.0, 500, rng=7).entries
    b = estimate_generation_matrix(c, 0.3, 1.0, 500, rng=7).entries
    assert np.array_equal(a, b)


def test_graph_classes():
    assert neighborhood_graph(uniform_generation_matrix(5)).kind == "complete"
    cycle = np.roll(np.eye(4), 1, axis=1)
    assert neighborhood_graph(cycle).kind == "strongly_connected"
    assert neighborhood_graph(np.eye(3)).kind == "neither"


def test_two_state_transition_matrix_by_hand():
    r = 0.3
    m = build_transition_matrix(uniform_generation_matrix(2), [0.0, 1.0], r, 1.0)
    expected, pi = eq10_transition_2(r)
    assert np.allclose(m.entries, expected)
    assert np.allclose(stationary_distribution(m).pi, pi, atol=1e-12)


def test_full_variance_is_uniform():
    f = np.array([2.0, 0.0, 5.0, 1.0])
    m = build_transition_matrix(uniform_generation_matrix(4), f, 1.0, 1.0)
    assert np.allclose(stationary_distribution(m).pi, 0.25)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-4, 0.999), st.integers(0, 2**31))
def test_metropolis_equals_eq10(r, seed):
    rng = np.random.default_rng(seed)
    f = rng.integers(0, 5, 6).astype(float)
    a = stochastic(rng, 6)
    m1 = build_transition_matrix(a, f, r, 1.0, "eq10")
    m2 = build_transition_matrix(a, f, r, 1.0, "metropolis")
    assert np.allclose(m1.entries, m2.entries, atol=1e-13, rtol=1e-12)
    assert np.allclose(acceptance_matrix(f, r, 1.0), acceptance_matrix(f, r, 1.0, "metropolis"), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 9), st.floats(1e-3, 1.0))
def test_stationary_matches_nullspace_oracle(seed, d, r):
    rng = np.random.default_rng(seed)
    a = stochastic(rng, d)
    f = rng.normal(size=d)
    m = build_transition_matrix(a, f, r, 1.0)
    assert np.allclose(m.entries.sum(axis=1), 1)
    sd = stationary_distribution(m)
    assert sd.residual <= 1e-8
    assert abs(sd.pi.sum() - 1) <= 1e-10 and np.all(sd.pi >= 0)
    assert np.allclose(sd.pi, stationary_nullspace(m.entries), atol=1e-9)


def test_reducible_chain_rejected():
    m = np.eye(3)
    with pytest.raises(ReducibleChainError):
        stationary_distribution(m)


def test_slow_mixing_low_temperature_chain():
    d = 8
    f = np.random.default_rng(0).permutation(d).astype(float)
    m = build_transition_matrix(uniform_generation_matrix(d), f, 1e-6, 1.0)
    sd = stationary_distribution(m)
    assert np.allclose(sd.pi, stationary_nullspace(m.entries), atol=1e-9)
    assert sd.pi[np.argmin(f)] > 0.999


def test_hypotheses_on_exact_generator():
    c = ctx(q=0.8)
    mats = [GenerationMatrix(exact_generation_matrix(c, tau).entries, s2) for tau, s2 in ((1.0, 0.9), (2.0, 0.81))]
    rep = check_convergence_hypotheses(mats, c.delta_bound())
    assert rep.passed
    d = rep.to_dict()
    assert d["delta_bound"]["observed_min"] >= c.delta_bound()


def test_hypotheses_detect_violations():
    cycle = GenerationMatrix(np.roll(np.eye(3), 1, axis=1), 0.5)
    uni = uniform_generation_matrix(3, 0.25)
    rep = check_convergence_hypotheses([cycle, uni], 0.1)
    assert not rep.combinatorial_symmetry.passed
    assert not rep.constant_graph.passed
    low = GenerationMatrix(np.array([[0.98, 0.02], [0.5, 0.5]]), 0.5)
    rep = check_convergence_hypotheses([low, low], 0.05)
    assert not rep.delta_bound.passed and rep.delta_bound.witness == [0, 0, 1]


def test_ladders():
    assert np.allclose(variance_ladder(2.0, 0.5, 3), [1.0, 0.5, 0.25])
    k = levels_to_temperature(0.1, 0.2)
    assert -1 / math.log(0.9**k) <= 0.2 < -1 / math.log(0.9 ** (k - 1))


def test_ladder_concentrates_on_minimum():
    f = np.array([2.0, 0.0, 3.0, 1.0])
    out = ladder_stationary(uniform_generation_matrix(4), f, 1.0, 0.5, 20)
    masses = [pi[1] for _, pi in out]
    assert all(b >= a - 1e-12 for a, b in zip(masses, masses[1:]))
    assert masses[-1] > 0.999
