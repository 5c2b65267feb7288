"""Laplace exponent, root finding, tilting, duality and model files."""

import math

import numpy as np
import pytest

from pssmplab import catalog
from pssmplab.errors import (
    BetaOutOfRange,
    ModelDoesNotHitZero,
    ModelFileError,
    NotCramerRoot,
    TiltOutsideDomain,
)
from pssmplab.models import (
    BetaClass,
    CompoundPoisson,
    Exponential,
    LevyModel,
    PointMass,
    TemperedPower,
    TwoSidedExponential,
    classify_beta,
    cramer_root,
    dual,
    esscher,
    model_from_dict,
    model_to_dict,
    tempered_power_killing_for_root,
)


def test_brownian_psi_closed_form():
    m = catalog.brownian()
    for lam in [-1.0, 0.0, 0.3, 0.5, 2.0]:
        assert m.psi(lam) == pytest.approx(-0.125 + 0.5 * lam * lam, abs=1e-15)
    assert m.psi_derivative(0.7) == pytest.approx(0.7, abs=1e-15)


def test_compound_poisson_psi_matches_mgf():
    law = TwoSidedExponential(rate_pos=2.0, rate_neg=1.0, p_pos=0.5)
    m = catalog.two_sided()
    for lam in [-0.5, 0.1, 1.0, 1.9]:
        expect = -1.0 / 3.0 - lam + 1.0 * (law.mgf(lam) - 1.0)
        assert m.psi(lam) == pytest.approx(expect, rel=1e-12)
    # outside the finiteness domain psi is encoded as +inf
    assert m.psi(2.5) == math.inf
    assert m.domain_sup == 2.0
    assert m.domain_inf == -1.0


def test_cramer_root_brownian():
    rep = cramer_root(catalog.brownian())
    assert rep.theta == pytest.approx(0.5, abs=1e-10)
    assert rep.psi_prime_at_theta == pytest.approx(0.5, abs=1e-9)
    assert rep.alpha_theta == pytest.approx(0.5, abs=1e-10)
    assert rep.jump_in_range[0] == 0.0
    assert rep.jump_in_range[1] == pytest.approx(0.5, abs=1e-10)
    assert rep.continuous_extension_exists
    assert rep.condition4_finite


def test_cramer_root_two_sided():
    m = catalog.two_sided()
    rep = cramer_root(m)
    assert rep.theta is not None
    assert abs(m.psi(rep.theta)) < 1e-9
    assert rep.theta == pytest.approx(1.6409245841812492, abs=1e-9)


def test_cramer_root_absent():
    # killed downward drift: psi(lam) = -kappa - lam stays negative
    rep = cramer_root(catalog.killed_drift())
    assert rep.theta is None
    assert rep.continuous_extension_exists is False
    assert rep.jump_in_range == (0.0, 1.0)


def test_cramer_root_requires_hitting_zero():
    with pytest.raises(ModelDoesNotHitZero):
        cramer_root(LevyModel(drift=1.0, gaussian=0.0, killing=0.0))


def test_boundary_root_model():
    m = catalog.boundary_root()
    rep = cramer_root(m)
    assert rep.theta == pytest.approx(1.0, abs=1e-9)
    assert rep.condition4_finite is False
    assert rep.psi_prime_at_theta == math.inf
    # alpha = 0.5 keeps alpha*theta < 1, so the continuous verdict holds
    assert rep.alpha_theta == pytest.approx(0.5, abs=1e-9)
    assert rep.continuous_extension_exists
    assert m.finite_at_domain_sup
    assert abs(m.psi(1.0)) < 1e-9


def test_tempered_power_killing_for_root():
    kappa = tempered_power_killing_for_root(1.0, 0.75, 0.01)
    assert kappa > 0
    m = LevyModel(jumps=(TemperedPower(1.0, 0.75, 0.01),), killing=kappa,
                  alpha=0.5)
    assert abs(m.psi(1.0)) < 1e-9


def test_tempered_power_small_jump_bias_bound():
    spec = TemperedPower(q=1.0, beta=0.75, delta=0.01)
    assert spec.small_jump_bias_bound() == pytest.approx(
        0.01 ** 0.25 / 0.25, rel=1e-12)
    assert spec.total_intensity > 0


def test_esscher_shifts_psi():
    m = catalog.two_sided()
    theta = cramer_root(m).theta
    t = esscher(m, theta)
    assert t.killing == 0.0
    for lam in [-0.3, 0.0, 0.2]:
        assert t.psi(lam) == pytest.approx(m.psi(lam + theta), abs=1e-8)
    assert t.mean() > 0


def test_esscher_brownian_drift_shift():
    m = catalog.brownian()
    t = esscher(m, 0.5)
    assert t.drift == pytest.approx(0.5)
    assert t.gaussian == 1.0
    assert t.killing == 0.0


def test_esscher_rejects_non_root():
    m = catalog.brownian()
    with pytest.raises(NotCramerRoot):
        esscher(m, 0.3)
    with pytest.raises(TiltOutsideDomain):
        esscher(catalog.two_sided(), 3.0)


def test_dual_negates_exponent():
    m = catalog.two_sided()
    d = dual(m)
    for lam in [-0.5, 0.3, 0.9]:
        assert d.psi(lam) == pytest.approx(m.psi(-lam), rel=1e-12)
    assert d.killing == m.killing


def test_classify_beta():
    m = catalog.brownian()
    assert classify_beta(m, 0.25) is BetaClass.JUMP_IN_EXISTS
    assert classify_beta(m, 0.5) is BetaClass.CRITICAL
    assert classify_beta(m, 0.8) is BetaClass.NEITHER
    with pytest.raises(BetaOutOfRange):
        classify_beta(m, 1.5)


def test_jump_law_tilts():
    law = Exponential(rate=2.0)
    mass, tilted = law.tilted(0.5)
    assert mass == pytest.approx(2.0 / 1.5)
    assert tilted.rate == pytest.approx(1.5)
    with pytest.raises(TiltOutsideDomain):
        law.tilted(2.5)
    pm = PointMass(0.7)
    mass, same = pm.tilted(1.0)
    assert mass == pytest.approx(math.exp(0.7))
    assert same is pm


def test_jump_law_reflection():
    law = TwoSidedExponential(2.0, 1.0, 0.25)
    r = law.reflected()
    assert (r.rate_pos, r.rate_neg, r.p_pos) == (1.0, 2.0, 0.75)
    assert r.mean() == pytest.approx(-law.mean())


def test_model_dict_round_trip():
    m = catalog.two_sided()
    again = model_from_dict(model_to_dict(m))
    assert again == m
    b = catalog.boundary_root()
    assert model_from_dict(model_to_dict(b)) == b


def test_model_from_dict_error_paths():
    with pytest.raises(ModelFileError, match=r"\$\.drift"):
        model_from_dict({"gaussian": 0.0, "jumps": [], "killing": 0.0,
                         "alpha": 1.0})
    with pytest.raises(ModelFileError, match=r"jumps\[0\]"):
        model_from_dict({"drift": 0.0, "gaussian": 0.0, "killing": 0.0,
                         "alpha": 1.0, "jumps": [{"type": "nope"}]})
    with pytest.raises(ModelFileError, match="number"):
        model_from_dict({"drift": "x", "gaussian": 0.0, "killing": 0.0,
                         "alpha": 1.0})
    with pytest.raises(ModelFileError):
        model_from_dict({"drift": 0.0, "gaussian": 0.0, "killing": 0.0,
                         "alpha": 1.0, "jumps": "not-a-list"})


def test_model_validation():
    with pytest.raises(ValueError):
        LevyModel(alpha=0.0)
    with pytest.raises(ValueError):
        LevyModel(gaussian=-1.0)
    with pytest.raises(ValueError):
        LevyModel(killing=-0.1)
    with pytest.raises(ValueError):
        CompoundPoisson(rate=0.0, law=PointMass(1.0))
    with pytest.raises(ValueError):
        TemperedPower(q=1.0, beta=1.2, delta=0.01)


def test_hits_zero():
    assert catalog.brownian().hits_zero()
    assert catalog.pure_drift().hits_zero()
    assert not LevyModel(drift=1.0).hits_zero()


def test_jump_sampler_laws():
    rng = np.random.default_rng(5)
    x = TemperedPower(q=1.0, beta=0.75, delta=0.01).sample_sizes(rng, 5000)
    assert (x > 0.01).all() or (x >= 0.01).all()
    y = TwoSidedExponential(2.0, 1.0, 0.5).sample(rng, 5000)
    frac_up = (y > 0).mean()
    assert abs(frac_up - 0.5) < 0.05
