import numpy as np
import pytest

from qtl.forms import QuadForm
from qtl.optimizer import (OptimizerConfig, OptimizerResult, UnitaryObjective,
                           ascend_from, gradient_check, maximize,
                           riemannian_gradient)

import oracles


def _trace_objective(a):
    """Re tr(a^dag U), maximized at the polar factor with value sum sigma."""
    d = a.shape[0]
    return UnitaryObjective(
        dim=d,
        value=lambda U: np.trace(a.conj().T @ U).real,
        euclidean_gradient=lambda U: a,
    )


def _fef_form(chi, n):
    proj = np.zeros((n * n, n * n), dtype=complex)
    v = oracles.max_ent(n)
    proj += np.outer(v, v.conj())
    return QuadForm(chi, proj, n)


def test_config_validation():
    OptimizerConfig()
    with pytest.raises(ValueError):
        OptimizerConfig(max_iters=0)
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(grad_tol=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(initial_step=-1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(min_step=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(armijo_shrink=1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(armijo_c=0.0)


def test_maximize_known_nuclear_norm():
    rng = np.random.default_rng(0)
    for d in (2, 3):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        res = maximize(_trace_objective(a), OptimizerConfig(seed=0))
        w, sig, vh = np.linalg.svd(a)
        assert abs(res.value - sig.sum()) < 1e-7
        assert np.abs(res.maximizer - w @ vh).max() < 1e-5


def test_maximizer_stays_unitary():
    rng = np.random.default_rng(1)
    chi = oracles.rand_density(4, rng)
    res = maximize(_fef_form(chi, 2).objective(), OptimizerConfig(seed=1))
    d = res.maximizer.shape[0]
    assert np.abs(res.maximizer @ res.maximizer.conj().T - np.eye(d)).max() < 1e-8


def test_accepted_values_are_monotone():
    rng = np.random.default_rng(2)
    chi = oracles.rand_density(4, rng)
    res = maximize(_fef_form(chi, 2).objective(),
                   OptimizerConfig(seed=2, restarts=4))
    assert len(res.traces) == 4
    for tr in res.traces:
        vals = tr[:, 0]
        assert np.all(np.diff(vals) >= -1e-12)
        assert np.all(tr[:, 1] >= 0.0)


def test_deterministic_given_seed():
    rng = np.random.default_rng(3)
    chi = oracles.rand_density(4, rng)
    obj = _fef_form(chi, 2).objective()
    r1 = maximize(obj, OptimizerConfig(seed=7, restarts=3))
    r2 = maximize(obj, OptimizerConfig(seed=7, restarts=3))
    assert r1.value == r2.value
    assert np.array_equal(r1.maximizer, r2.maximizer)
    assert r1.iterations == r2.iterations
    r3 = maximize(obj, OptimizerConfig(seed=8, restarts=3))
    assert r3.value == pytest.approx(r1.value, abs=1e-7)


def test_warm_starts_all_run():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    obj = _trace_objective(a)
    w, _, vh = np.linalg.svd(a)
    best = w @ vh
    # restarts=1 would normally run only the identity; both warm starts still run
    res = maximize(obj, OptimizerConfig(seed=4, restarts=1),
                   starts=(oracles.haar(3, rng), best))
    assert len(res.traces) == 3
    assert abs(res.value - np.linalg.svd(a)[1].sum()) < 1e-7
    with pytest.raises(ValueError):
        maximize(obj, OptimizerConfig(seed=4), starts=(np.eye(2),))


def test_tie_breaks_toward_earlier_start():
    obj = UnitaryObjective(dim=2,
                           value=lambda U: 1.0 + 0j,
                           euclidean_gradient=lambda U: np.zeros((2, 2)))
    res = maximize(obj, OptimizerConfig(seed=5, restarts=4))
    assert res.best_index == 0
    assert res.value == 1.0
    assert np.allclose(res.maximizer, np.eye(2))


def test_result_trace_points_at_best_run():
    rng = np.random.default_rng(6)
    chi = oracles.rand_density(4, rng)
    res = maximize(_fef_form(chi, 2).objective(),
                   OptimizerConfig(seed=6, restarts=3))
    assert isinstance(res, OptimizerResult)
    assert res.trace is res.traces[res.best_index]
    assert res.iterations == sum(len(t) for t in res.traces)


def test_ascend_from_single_start():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    res = ascend_from(_trace_objective(a), np.eye(2))
    assert len(res.traces) == 1
    assert res.best_index == 0
    assert abs(res.value - np.linalg.svd(a)[1].sum()) < 1e-7


def test_riemannian_gradient_shape_and_guard():
    rng = np.random.default_rng(8)
    u = oracles.haar(3, rng)
    eg = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    g = riemannian_gradient(u, eg)
    assert np.allclose(g, -(g.conj().T))
    with pytest.raises(ValueError, match="unitary"):
        riemannian_gradient(1.5 * u, eg)


def test_gradient_check_accepts_true_gradient():
    rng = np.random.default_rng(9)
    chi = oracles.rand_density(4, rng)
    worst = gradient_check(_fef_form(chi, 2).objective(), samples=10, rng=9)
    assert worst < 1e-5


def test_gradient_check_flags_broken_gradient():
    rng = np.random.default_rng(10)
    chi = oracles.rand_density(4, rng)
    form = _fef_form(chi, 2)
    broken = UnitaryObjective(dim=2, value=form.value,
                              euclidean_gradient=lambda U: 2.0 * form.gradient(U))
    assert gradient_check(broken, samples=5, rng=10) > 0.1
    with pytest.raises(ValueError):
        gradient_check(form.objective(), samples=0)


def test_non_real_objective_rejected():
    obj = UnitaryObjective(dim=2,
                           value=lambda U: 1j,
                           euclidean_gradient=lambda U: np.zeros((2, 2)))
    with pytest.raises(ValueError, match="non-real"):
        maximize(obj, OptimizerConfig(seed=11, restarts=1))


def test_argmax_invariant_under_positive_scaling():
    # injecting a scaled objective must not move the maximizer
    rng = np.random.default_rng(12)
    chi = oracles.rand_density(4, rng)
    form = _fef_form(chi, 2)
    scaled = QuadForm(3.0 * form.A, form.B, form.m)
    cfg = OptimizerConfig(seed=12, restarts=4)
    r1 = maximize(form.objective(), cfg)
    r3 = maximize(scaled.objective(), cfg)
    assert abs(r3.value - 3.0 * r1.value) < 1e-7
    # the scaled run's maximizer achieves the unscaled optimum
    assert abs(form.value(r3.maximizer).real - r1.value) < 1e-8
