"""Window-kernel backends: equivalence, target crossing, segment integrals."""

import math

import numpy as np
import pytest
from scipy import integrate

from pssmplab import catalog
from pssmplab._kernels import _py

try:
    from pssmplab._kernels import _core
except ImportError:
    _core = None

from pssmplab.engine import HIT, KILLED, marginal_batch, segment_exp_integral
from pssmplab.paths import SimConfig, stream_rng


def _state(n):
    return dict(x=np.zeros(n), a=np.zeros(n), t=np.zeros(n), w=np.zeros(n),
                done=np.zeros(n, np.uint8))


def _run(impl, normals, zeta, target, mode, b=0.3, sigma=1.0, dt=0.01):
    n = normals.shape[1]
    s = _state(n)
    impl.advance_window(s["x"], s["a"], s["t"], s["w"], s["done"], zeta,
                        target, normals, b, sigma, dt, 1.0, -1.0, mode)
    return s


@pytest.mark.skipif(_core is None, reason="compiled backend not built")
def test_backends_agree_on_identical_draws():
    rng = stream_rng(11, 0)
    n = 500
    normals = rng.standard_normal((128, n))
    zeta = rng.exponential(1.0, n)
    target = np.full(n, 0.4)
    for mode in (_py.STOP_AT_ZETA, _py.TARGET):
        a = _run(_py, normals.copy(), zeta.copy(), target.copy(), mode)
        b = _run(_core, normals.copy(), zeta.copy(), target.copy(), mode)
        np.testing.assert_array_equal(a["done"], b["done"])
        for key in ("x", "a", "t", "w"):
            np.testing.assert_allclose(a[key], b[key], rtol=1e-12, atol=1e-14)


def test_stop_at_zeta_exact_boundary():
    # pure drift, no noise: the last partial step must land exactly on zeta
    n = 4
    zeta = np.array([0.005, 0.5, 0.755, 2.0])
    normals = np.zeros((128, n))
    s = _state(n)
    _py.advance_window(s["x"], s["a"], s["t"], s["w"], s["done"], zeta,
                       np.zeros(n), normals, -1.0, 0.0, 0.01, 1.0, 1.0,
                       _py.STOP_AT_ZETA)
    done = s["done"] == 1
    assert done[:3].all() and not done[3]  # 2.0 > 128 * 0.01
    np.testing.assert_allclose(s["t"][:3], zeta[:3], atol=1e-15)
    # A(zeta) = 1 - e^{-zeta} for xi_s = -s
    np.testing.assert_allclose(s["a"][:3], 1.0 - np.exp(-zeta[:3]),
                               rtol=1e-12)


def test_target_crossing_closed_form():
    # xi_s = -s, integrand e^{xi}: A(s) = 1 - e^{-s}, so A crosses r at
    # s* = -log(1 - r) and xi at the crossing is log(1 - r)
    # one window covers time 1.28, i.e. clock values up to 1 - e^{-1.28}
    n = 3
    target = np.array([0.1, 0.5, 0.7])
    normals = np.zeros((128, n))
    s = _state(n)
    _py.advance_window(s["x"], s["a"], s["t"], s["w"], s["done"],
                       np.full(n, np.inf), target, normals, -1.0, 0.0,
                       0.01, 1.0, 1.0, _py.TARGET)
    assert (s["done"] == 2).all()
    np.testing.assert_allclose(s["t"], -np.log1p(-target), rtol=1e-12)
    np.testing.assert_allclose(s["x"], np.log1p(-target), rtol=1e-12)
    np.testing.assert_allclose(s["a"], target, rtol=1e-15)


def test_marginal_batch_pure_drift():
    cfg = SimConfig(dt=0.01, horizon=100.0, seed=0)
    targets = np.array([0.25, 0.5, 0.75])
    batch = marginal_batch(catalog.pure_drift(), targets, cfg.rng(), cfg)
    assert (batch.status == HIT).all()
    np.testing.assert_allclose(batch.xi, np.log1p(-targets), rtol=1e-10)


def test_marginal_batch_jump_engine_statuses():
    cfg = SimConfig(dt=0.01, horizon=400.0, seed=0)
    targets = np.full(2000, 0.3)
    batch = marginal_batch(catalog.two_sided(), targets, cfg.rng(), cfg)
    assert set(np.unique(batch.status)) <= {HIT, KILLED}
    assert (batch.status == HIT).any() and (batch.status == KILLED).any()
    assert np.isfinite(batch.xi[batch.status == HIT]).all()


def test_segment_exp_integral_matches_quadrature():
    rng = np.random.default_rng(2)
    for _ in range(20):
        x0 = rng.normal()
        inc = rng.normal()
        gap = rng.uniform(0.01, 2.0)
        ia = rng.uniform(0.3, 3.0)
        sign = rng.choice([-1.0, 1.0])
        val = segment_exp_integral(np.array([x0]), np.array([inc]),
                                   np.array([gap]), ia, sign)[0]
        ref, _ = integrate.quad(
            lambda s: math.exp(sign * ia * (x0 + inc * s / gap)), 0.0, gap)
        assert val == pytest.approx(ref, rel=1e-10)


def test_segment_exp_integral_zero_increment():
    val = segment_exp_integral(np.array([0.5]), np.array([0.0]),
                               np.array([1.5]), 2.0)[0]
    assert val == pytest.approx(1.5 * math.exp(1.0), rel=1e-14)
