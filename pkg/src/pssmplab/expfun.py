"""Exponential functionals of the Levy process and their moment identities.

Two functionals drive everything downstream:

    I = integral_0^zeta e^{xi_s/alpha} ds        (under the base model)
    J = integral_0^inf e^{-xi_s/alpha} ds        (under the tilted model)

I is the hitting time of 0 from x0 = 1; J drives the entrance law of the
continuous recurrent extension.  The checks below compare independent Monte
Carlo estimates of both sides of the moment recursion, the I/J duality and
the negative-moment identity, reporting z-scores rather than verdicts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import functional_batch
from .errors import (
    DerivativeInfinite,
    HorizonTooShort,
    HypothesisViolated,
    ModelDoesNotHitZero,
    NoCramerRoot,
    NotDriftingUp,
)
from .models import LevyModel, cramer_root, dual, esscher
from .paths import SimConfig

__all__ = ["ExpFunEstimate", "CheckReport", "sample_I", "sample_J",
           "sample_I_batch", "sample_J_batch", "moment", "recursion_check",
           "dual_identity_check", "negative_moment_check"]

NEAR_CRITICAL_PSI = 0.02


@dataclass
class ExpFunEstimate:
    value: float
    std_err: float
    n: int
    censored: int
    truncation_note: str = ""

    def to_json(self) -> dict:
        return {"value": self.value, "se": self.std_err, "n": self.n,
                "censored": self.censored, "note": self.truncation_note}


@dataclass
class CheckReport:
    lhs: float
    rhs: float
    std_err: float
    z_score: float
    n: int
    censored: int

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "se": self.std_err,
                "z": self.z_score, "n": self.n, "censored": self.censored}


def _require_hits_zero(model: LevyModel):
    if not model.hits_zero():
        raise ModelDoesNotHitZero(
            "I requires killing > 0 or a model drifting to -inf")


def sample_I_batch(model: LevyModel, n: int, config: SimConfig,
                   rng: Optional[np.random.Generator] = None,
                   rel_tol: float = 1e-6):
    """n draws of I; returns (values, censored mask)."""
    _require_hits_zero(model)
    if rng is None:
        rng = config.rng()
    batch = functional_batch(model, 1.0, n, rng, config, rel_tol=rel_tol)
    return batch.values, batch.censored


def sample_J_batch(tilted: LevyModel, n: int, config: SimConfig,
                   rng: Optional[np.random.Generator] = None,
                   rel_tol: float = 1e-6):
    """n draws of J under a conservative model drifting to +inf."""
    if tilted.killing > 0 or not tilted.mean() > 0:
        raise NotDriftingUp("J requires a conservative model with psi'(0) > 0")
    if rng is None:
        rng = config.rng()
    batch = functional_batch(tilted, -1.0, n, rng, config, rel_tol=rel_tol)
    return batch.values, batch.censored


def sample_I(model: LevyModel, config: SimConfig,
             rel_tol: float = 1e-6) -> float:
    """One draw of I; raises when the horizon decided neither way."""
    values, censored = sample_I_batch(model, 1, config, rel_tol=rel_tol)
    if censored[0]:
        raise HorizonTooShort("I draw censored at the horizon")
    return float(values[0])


def sample_J(tilted: LevyModel, config: SimConfig,
             rel_tol: float = 1e-6) -> float:
    values, censored = sample_J_batch(tilted, 1, config, rel_tol=rel_tol)
    if censored[0]:
        raise HorizonTooShort("J draw censored at the horizon")
    return float(values[0])


def _mean_with_se(x: np.ndarray):
    m = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.inf
    return m, se


def _power_mean(values: np.ndarray, censored: np.ndarray, p: float, n: int,
                note: str) -> ExpFunEstimate:
    alive = values[~censored]
    m, se = _mean_with_se(alive ** p)
    return ExpFunEstimate(value=m, std_err=se, n=n,
                          censored=int(censored.sum()),
                          truncation_note=note)


def _check_moment_hypothesis(model: LevyModel, p: float):
    """Existence gate for E(I^p), stated through psi at beta = p/alpha
    (positive p) or beta = (p+1)/alpha (negative p, shifted-moment form)."""
    if p > 0:
        beta = p / model.alpha
        v = model.psi(beta)
        if not v < 0:
            raise HypothesisViolated(
                f"E(I^{p}) is infinite: psi({beta:g}) = {v:g} >= 0")
    elif p < 0:
        if p < -1:
            raise HypothesisViolated("negative moments supported on [-1, 0)")
        beta = (p + 1.0) / model.alpha
        v = model.psi(beta)
        if v > 0:
            raise HypothesisViolated(
                f"E(I^{p}) not covered: psi({beta:g}) = {v:g} > 0")
    else:
        beta = 0.0
        v = 0.0
    if p > 0 and 0.0 < abs(v) < NEAR_CRITICAL_PSI:
        warnings.warn(
            f"psi({beta:g}) = {v:g} is near-critical; the moment estimator "
            "has heavy tails -- increase n accordingly", stacklevel=3)


def moment(model: LevyModel, p: float, n: int, config: SimConfig,
           functional: str = "I",
           rng: Optional[np.random.Generator] = None) -> ExpFunEstimate:
    """Monte Carlo E(functional^p) with the moment-existence gate for I."""
    note = f"horizon={config.horizon}, adaptive rel_tol=1e-6"
    if functional == "I":
        _check_moment_hypothesis(model, p)
        values, censored = sample_I_batch(model, n, config, rng=rng)
    elif functional == "J":
        values, censored = sample_J_batch(model, n, config, rng=rng)
    else:
        raise ValueError("functional must be 'I' or 'J'")
    return _power_mean(values, censored, p, n, note)


def recursion_check(model: LevyModel, beta: float, n: int,
                    config: SimConfig) -> CheckReport:
    """Moment recursion E(I^{alpha beta}) = (alpha beta / -psi(beta)) *
    E(I^{alpha beta - 1}), both sides estimated on independent streams."""
    if not 0.0 < beta < 1.0 / model.alpha:
        raise HypothesisViolated(
            f"beta={beta} must lie in (0, {1.0 / model.alpha:g})")
    v = model.psi(beta)
    if not v < 0:
        raise HypothesisViolated(f"psi({beta:g}) = {v:g} must be < 0")
    if abs(v) < NEAR_CRITICAL_PSI:
        warnings.warn(
            f"psi({beta:g}) = {v:g} is near-critical; variance is large",
            stacklevel=2)
    ab = model.alpha * beta
    lhs = moment(model, ab, n, config, rng=config.rng())
    low = moment(model, ab - 1.0, n, config, rng=config.substream(1).rng())
    factor = ab / (-v)
    rhs = factor * low.value
    se = math.hypot(lhs.std_err, factor * low.std_err)
    z = abs(lhs.value - rhs) / se if se > 0 else 0.0
    return CheckReport(lhs=lhs.value, rhs=rhs, std_err=se, z_score=z, n=n,
                       censored=lhs.censored + low.censored)


def _theta_or_raise(model: LevyModel) -> float:
    report = cramer_root(model)
    if report.theta is None:
        raise NoCramerRoot("psi has no positive root on its domain")
    return report.theta


def dual_identity_check(model: LevyModel, n: int,
                        config: SimConfig) -> CheckReport:
    """E_tilted(J^{alpha theta - 1}) against E(I^{alpha theta - 1})."""
    theta = _theta_or_raise(model)
    p = model.alpha * theta - 1.0
    tilted = esscher(model, theta)
    jv, jc = sample_J_batch(tilted, n, config, rng=config.rng())
    lhs = _power_mean(jv, jc, p, n, "")
    rhs = moment(model, p, n, config, rng=config.substream(1).rng())
    se = math.hypot(lhs.std_err, rhs.std_err)
    z = abs(lhs.value - rhs.value) / se if se > 0 else 0.0
    return CheckReport(lhs=lhs.value, rhs=rhs.value, std_err=se, z_score=z,
                       n=n, censored=lhs.censored + rhs.censored)


def negative_moment_check(model: LevyModel, n: int,
                          config: SimConfig) -> CheckReport:
    """E_tilted(J^{-1}) against the analytic derivative psi'(theta)."""
    theta = _theta_or_raise(model)
    report = cramer_root(model)
    if report.condition4_finite is False or \
            not math.isfinite(report.psi_prime_at_theta):
        raise DerivativeInfinite(
            "psi'_-(theta) diverges (boundary root): E_tilted(J^{-1}) is "
            "infinite and the estimate grows with n instead of stabilizing")
    tilted = esscher(model, theta)
    jv, jc = sample_J_batch(tilted, n, config, rng=config.rng())
    lhs = _power_mean(jv, jc, -1.0, n, "")
    rhs = report.psi_prime_at_theta
    z = abs(lhs.value - rhs) / lhs.std_err if lhs.std_err > 0 else 0.0
    return CheckReport(lhs=lhs.value, rhs=rhs, std_err=lhs.std_err, z_score=z,
                       n=n, censored=lhs.censored)
