import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqcls.errors import ValidationError
from aqcls.evolution import Schedule
from aqcls.hamiltonians import ProblemFamily, TabuHamiltonian, transverse_field_initial
from aqcls.quantum import ground_state
from aqcls.search import (
    TRACE_COLUMNS,
    AqclsConfig,
    SearchState,
    acceptance_probability,
    run_aqcls,
    sample_parameters,
    temperature_of_variance,
    update_state,
)

from oracles import brute_argmin

# Short-run hyperparameters for the 4-point optimality example (box family).
TUNED = dict(t_min=5.0, nu=5.0, eta=0.5, n_level=5, n_max=30, i_max=500)


def test_config_validation_messages():
    with pytest.raises(ValidationError, match=r"eta must be in \(0,1\)"):
        AqclsConfig(eta=1.5)
    with pytest.raises(ValidationError, match=r"q must be in \[0,1\)"):
        AqclsConfig(q=1.0)
    for bad in (dict(t_min=0), dict(nu=-1), dict(sigma2_max=0), dict(n_level=0), dict(n_max=0), dict(i_max=0)):
        with pytest.raises(ValidationError):
            AqclsConfig(**bad)


def test_documented_defaults():
    c = AqclsConfig()
    assert (c.q, c.eta, c.n_level, c.sigma2_max, c.t_min, c.nu, c.n_max, c.i_max) == (0.9, 0.1, 10, 1, 1, 1, 50, 1000)


def test_sample_parameters_zero_variance():
    w = np.array([0.3, -1.2])
    assert np.array_equal(sample_parameters(w, 0.0, np.random.default_rng(0)), w)


def test_sample_parameters_moments():
    rng = np.random.default_rng(0)
    draws = np.array([sample_parameters(np.zeros(4), 1.0, rng) for _ in range(100_000)])
    assert np.all(np.abs(draws.mean(axis=0)) <= 0.02)
    assert np.all(np.abs(draws.var(axis=0) - 1) <= 0.02)


def test_sample_parameters_clipped():
    rng = np.random.default_rng(0)
    for _ in range(200):
        w = sample_parameters(np.full(3, 0.999), 1.0, rng, (-1.0, 1.0))
        assert np.all((-1 <= w) & (w <= 1))


def test_acceptance_examples():
    assert acceptance_probability(2, 3, 0.7, 1.0) == 1.0
    assert acceptance_probability(5, 3, 0.5, 1.0) == pytest.approx(0.25)
    assert acceptance_probability(3, 3, 1e-300, 1.0) == 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(1e-6, 1.0))
def test_acceptance_range_and_metropolis_identity(f_new, f_star, r):
    p = acceptance_probability(f_new, f_star, r, 1.0)
    assert 0.0 <= p <= 1.0
    if f_new > f_star and r < 1.0:
        t = temperature_of_variance(r, 1.0)
        assert p == pytest.approx(math.exp(-(f_new - f_star) / t), rel=1e-9, abs=1e-300)


def test_temperature_examples():
    assert temperature_of_variance(1 / math.e, 1.0) == pytest.approx(1.0)
    assert temperature_of_variance(math.exp(-2), 1.0) == pytest.approx(0.5)
    assert temperature_of_variance(2.0, 2.0) == math.inf
    with pytest.raises(ValidationError):
        temperature_of_variance(0.0, 1.0)


@pytest.mark.parametrize("delta, r", [(1, 0.5), (2, 0.5), (1, 0.1)])
def test_forced_suboptimal_acceptance_frequency(delta, r):
    rng = np.random.default_rng(12345)
    n, hits = 10_000, 0
    for _ in range(n):
        s = SearchState(0, 0.0, np.zeros(2), r, 1.0, TabuHamiltonian(2))
        accepted, event = update_state(s, 1, float(delta), np.ones(2), 1.0, rng)
        assert event in ("suboptimal", "rejected") and s.d == 1 and s.tabu.size == 0
        hits += accepted
    p = r**delta
    assert abs(hits / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_update_state_events():
    rng = np.random.default_rng(0)
    s = SearchState(2, 5.0, np.zeros(2), 0.5, 1.0, TabuHamiltonian(4))
    assert update_state(s, 2, 5.0, np.ones(2), 1.0, rng) == (0, "repeat") and s.e == 1
    assert update_state(s, 1, 3.0, np.ones(2), 1.0, rng) == (1, "better")
    assert s.x_star == 1 and s.tabu.penalized == (2,) and s.d == 0


def _run(f, n, seed=0, **kw):
    fam = ProblemFamily.diagonal(2**n, (-1.0, 1.0))
    return run_aqcls(np.asarray(f, float), fam, transverse_field_initial(n), Schedule(), AqclsConfig(seed=seed, **kw))


def test_constant_objective_counts_every_distinct_candidate():
    res = _run([1.0] * 4, 2, seed=3, n_max=25)
    assert res.trace[-1].d + res.trace[-1].e >= 25
    for rec in res.trace:
        assert rec.event in ("suboptimal", "repeat")
    d = [r.d for r in res.trace]
    distinct = np.cumsum([r.event != "repeat" for r in res.trace])
    assert d == distinct.tolist()


@pytest.mark.parametrize("seed", range(4))
def test_trace_invariants(seed):
    f = np.array([3.0, 1.0, 2.0, 0.0])
    cfg = dict(t_min=2.0, nu=0.5, eta=0.2, n_level=3, n_max=40, i_max=60)
    res = _run(f, 2, seed=seed, **cfg)
    c = AqclsConfig(**cfg)
    init_tabu = int(res.init["x1"] != res.init["x2"])
    better = 0
    best = np.inf
    for k, rec in enumerate(res.trace):
        level = k // c.n_level + 1
        assert rec.sigma2 == c.sigma2_max * (1 - c.eta) ** level
        assert rec.tau == c.t_min + level * c.nu
        assert rec.f_star == f[rec.x_star]
        better += rec.event == "better"
        assert rec.tabu_size == init_tabu + better
        best = min(best, rec.f_star)
        assert rec.f_best <= best
        if k:
            assert rec.f_best <= res.trace[k - 1].f_best
    last = res.trace[-1]
    assert len(res.trace) == c.i_max or last.d + last.e >= c.n_max
    assert len(res.trace) <= c.i_max
    np.testing.assert_allclose(np.diag(res.H_P.matrix), res.w_star + res.tabu.counts())


def test_growth_hook():
    c = AqclsConfig(t_min=2.0, growth=lambda t: 2 * t)
    assert [c.tau_at(k) for k in range(4)] == [2.0, 4.0, 8.0, 16.0]


def test_seed_determinism(tmp_path):
    f = [3.0, 1.0, 2.0, 0.0]
    a, b = _run(f, 2, seed=9, n_max=20), _run(f, 2, seed=9, n_max=20)
    a.write_trace(tmp_path / "a.csv")
    b.write_trace(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
    c = _run(f, 2, seed=10, n_max=20)
    assert [r.csv_row() for r in c.trace] != [r.csv_row() for r in a.trace]


def test_objective_shape_mismatch():
    with pytest.raises(ValidationError):
        _run([0.0, 1.0], 2)


def test_table_objective_optimality_example():
    f = np.array([3.0, 1.0, 2.0, 0.0])
    target = brute_argmin(f)
    wins = sum(_run(f, 2, seed=s, **TUNED).x_star in target for s in range(20))
    assert wins >= 18


def test_unbounded_family_uses_gaussian_initialization():
    fam = ProblemFamily.diagonal(4)
    res = run_aqcls(np.arange(4.0), fam, transverse_field_initial(2), Schedule(),
                    AqclsConfig(seed=1, n_max=5, w0=(5, 5, 5, 5)))
    assert np.all(np.abs(np.array(res.init["w1"]) - 5) < 6)
    _, psi, _ = ground_state(res.H_P)
    assert psi.dim == 4
