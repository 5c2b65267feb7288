"""Killed Levy process models: characteristics, Laplace exponent, tilting, duality.

A model bundles drift, Gaussian coefficient, a list of compound-Poisson-style
jump components, a killing rate and the self-similarity index alpha of the
positive Markov process obtained from it by time change.  The Laplace exponent

    psi(lam) = -kappa + b*lam + sigma2*lam**2/2 + sum_j integral (e^{lam x} - 1) nu_j(dx)

is strictly convex on its finiteness domain; everything in this module is a
pure function of immutable values.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import (
    BetaOutOfRange,
    ModelDoesNotHitZero,
    ModelFileError,
    NotCramerRoot,
    TiltOutsideDomain,
)

__all__ = [
    "Exponential",
    "TwoSidedExponential",
    "PointMass",
    "CompoundPoisson",
    "TemperedPower",
    "LevyModel",
    "CramerReport",
    "BetaClass",
    "psi",
    "psi_derivative",
    "cramer_root",
    "esscher",
    "dual",
    "classify_beta",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "tempered_power_killing_for_root",
]

_QUAD_TOL = 1e-10
ROOT_TOL = 1e-12


# ---------------------------------------------------------------------------
# jump laws for compound Poisson components


@dataclass(frozen=True)
class Exponential:
    """One-sided exponential jump law with the given rate; sign +1 or -1."""

    rate: float
    sign: int = 1

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Exponential jump rate must be > 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def domain_sup(self) -> float:
        return self.rate if self.sign > 0 else math.inf

    @property
    def domain_inf(self) -> float:
        return -self.rate if self.sign < 0 else -math.inf

    def mgf(self, lam: float) -> float:
        s = self.sign * lam
        if s >= self.rate:
            return math.inf
        return self.rate / (self.rate - s)

    def mgf_derivative(self, lam: float) -> float:
        s = self.sign * lam
        if s >= self.rate:
            return math.inf
        return self.sign * self.rate / (self.rate - s) ** 2

    def mean(self) -> float:
        return self.sign / self.rate

    def tilted(self, theta: float) -> Tuple[float, "Exponential"]:
        m = self.mgf(theta)
        if not math.isfinite(m):
            raise TiltOutsideDomain(f"tilt {theta} outside domain of {self}")
        return m, Exponential(self.rate - self.sign * theta, self.sign)

    def reflected(self) -> "Exponential":
        return Exponential(self.rate, -self.sign)

    def upward_exp_moment_finite(self, theta: float) -> bool:
        return self.sign < 0 or theta < self.rate

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.sign * rng.exponential(1.0 / self.rate, size=size)

    def to_json(self) -> dict:
        return {"type": "exponential", "rate": self.rate,
                "sign": "+" if self.sign > 0 else "-"}


@dataclass(frozen=True)
class TwoSidedExponential:
    """Mixture of an upward Exp(rate_pos) and a downward Exp(rate_neg) jump."""

    rate_pos: float
    rate_neg: float
    p_pos: float

    def __post_init__(self):
        if self.rate_pos <= 0 or self.rate_neg <= 0:
            raise ValueError("two-sided exponential rates must be > 0")
        if not 0.0 <= self.p_pos <= 1.0:
            raise ValueError("p_pos must be in [0, 1]")

    @property
    def domain_sup(self) -> float:
        return self.rate_pos if self.p_pos > 0 else math.inf

    @property
    def domain_inf(self) -> float:
        return -self.rate_neg if self.p_pos < 1 else -math.inf

    def mgf(self, lam: float) -> float:
        out = 0.0
        if self.p_pos > 0:
            if lam >= self.rate_pos:
                return math.inf
            out += self.p_pos * self.rate_pos / (self.rate_pos - lam)
        if self.p_pos < 1:
            if lam <= -self.rate_neg:
                return math.inf
            out += (1 - self.p_pos) * self.rate_neg / (self.rate_neg + lam)
        return out

    def mgf_derivative(self, lam: float) -> float:
        if not math.isfinite(self.mgf(lam)):
            return math.inf
        out = 0.0
        if self.p_pos > 0:
            out += self.p_pos * self.rate_pos / (self.rate_pos - lam) ** 2
        if self.p_pos < 1:
            out -= (1 - self.p_pos) * self.rate_neg / (self.rate_neg + lam) ** 2
        return out

    def mean(self) -> float:
        return self.p_pos / self.rate_pos - (1 - self.p_pos) / self.rate_neg

    def tilted(self, theta: float) -> Tuple[float, "TwoSidedExponential"]:
        m = self.mgf(theta)
        if not math.isfinite(m):
            raise TiltOutsideDomain(f"tilt {theta} outside domain of {self}")
        mp = self.p_pos * self.rate_pos / (self.rate_pos - theta) if self.p_pos > 0 else 0.0
        return m, TwoSidedExponential(
            self.rate_pos - theta, self.rate_neg + theta, mp / m)

    def reflected(self) -> "TwoSidedExponential":
        return TwoSidedExponential(self.rate_neg, self.rate_pos, 1.0 - self.p_pos)

    def upward_exp_moment_finite(self, theta: float) -> bool:
        return self.p_pos == 0 or theta < self.rate_pos

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        up = rng.random(size) < self.p_pos
        out = np.where(
            up,
            rng.exponential(1.0 / self.rate_pos, size=size),
            -rng.exponential(1.0 / self.rate_neg, size=size),
        )
        return out

    def to_json(self) -> dict:
        return {"type": "two_sided_exponential", "rate_pos": self.rate_pos,
                "rate_neg": self.rate_neg, "p_pos": self.p_pos}


@dataclass(frozen=True)
class PointMass:
    """Deterministic jump size."""

    value: float

    @property
    def domain_sup(self) -> float:
        return math.inf

    @property
    def domain_inf(self) -> float:
        return -math.inf

    def mgf(self, lam: float) -> float:
        return math.exp(lam * self.value)

    def mgf_derivative(self, lam: float) -> float:
        return self.value * math.exp(lam * self.value)

    def mean(self) -> float:
        return self.value

    def tilted(self, theta: float) -> Tuple[float, "PointMass"]:
        return math.exp(theta * self.value), self

    def reflected(self) -> "PointMass":
        return PointMass(-self.value)

    def upward_exp_moment_finite(self, theta: float) -> bool:
        return True

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)

    def to_json(self) -> dict:
        return {"type": "point_mass", "value": self.value}


# ---------------------------------------------------------------------------
# jump components


@dataclass(frozen=True)
class CompoundPoisson:
    """Jumps at the given Poisson rate with law drawn from ``law``."""

    rate: float
    law: object

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("compound Poisson rate must be > 0")

    @property
    def intensity(self) -> float:
        return self.rate

    @property
    def domain_sup(self) -> float:
        return self.law.domain_sup

    @property
    def domain_inf(self) -> float:
        return self.law.domain_inf

    @property
    def finite_at_sup(self) -> bool:
        return False

    def exponent(self, lam: float) -> float:
        m = self.law.mgf(lam)
        return math.inf if not math.isfinite(m) else self.rate * (m - 1.0)

    def exponent_derivative(self, lam: float) -> float:
        d = self.law.mgf_derivative(lam)
        return math.inf if not math.isfinite(d) else self.rate * d

    def mean_rate(self) -> float:
        return self.rate * self.law.mean()

    def tilted(self, theta: float) -> "CompoundPoisson":
        m, law = self.law.tilted(theta)
        return CompoundPoisson(self.rate * m, law)

    def reflected(self) -> "CompoundPoisson":
        return CompoundPoisson(self.rate, self.law.reflected())

    def upward_exp_moment_finite(self, theta: float) -> bool:
        return self.law.upward_exp_moment_finite(theta)

    def sample_sizes(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.law.sample(rng, size)

    def to_json(self) -> dict:
        return {"type": "compound_poisson", "rate": self.rate,
                "law": self.law.to_json()}


@dataclass(frozen=True)
class TemperedPower:
    """Jump intensity e^{-q|x|} |x|^{-1-beta} on sign*(delta, inf).

    Jumps below the cutoff delta are not part of the model (a subordinator
    needs no compensation); the implied bias bound for dropping the small
    jumps of the untruncated intensity is delta^{1-beta}/(1-beta).
    """

    q: float
    beta: float
    delta: float
    sign: int = 1
    total_intensity: float = field(init=False, compare=False, default=0.0)

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("tempering rate q must be >= 0")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("power index beta must be in (0, 1)")
        if self.delta <= 0:
            raise ValueError("truncation delta must be > 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        val, _ = integrate.quad(
            lambda x: math.exp(-self.q * x) * x ** (-1.0 - self.beta),
            self.delta, math.inf, epsabs=_QUAD_TOL, epsrel=1e-12, limit=200)
        object.__setattr__(self, "total_intensity", val)

    @property
    def intensity(self) -> float:
        return self.total_intensity

    @property
    def domain_sup(self) -> float:
        return self.q if self.sign > 0 else math.inf

    @property
    def domain_inf(self) -> float:
        return -self.q if self.sign < 0 else -math.inf

    @property
    def finite_at_sup(self) -> bool:
        # at lam = q the integrand becomes (1 - e^{-qx}) x^{-1-beta}, integrable
        return self.sign > 0

    def small_jump_bias_bound(self) -> float:
        return self.delta ** (1.0 - self.beta) / (1.0 - self.beta)

    def exponent(self, lam: float) -> float:
        s = self.sign * lam
        if s > self.q:
            return math.inf
        q, beta, delta = self.q, self.beta, self.delta
        # (e^{sx} - 1) e^{-qx} written as a difference of bounded exponentials
        val, _ = integrate.quad(
            lambda x: (math.exp((s - q) * x) - math.exp(-q * x)) * x ** (-1.0 - beta),
            delta, math.inf, epsabs=_QUAD_TOL, epsrel=1e-12, limit=200)
        return val

    def exponent_derivative(self, lam: float) -> float:
        s = self.sign * lam
        if s >= self.q:
            return math.inf if self.sign > 0 else -math.inf
        q, beta, delta = self.q, self.beta, self.delta
        val, _ = integrate.quad(
            lambda x: math.exp((s - q) * x) * x ** (-beta),
            delta, math.inf, epsabs=_QUAD_TOL, epsrel=1e-12, limit=200)
        return self.sign * val

    def mean_rate(self) -> float:
        return self.exponent_derivative(0.0)

    def tilted(self, theta: float) -> "TemperedPower":
        s = self.sign * theta
        if s > self.q:
            raise TiltOutsideDomain(f"tilt {theta} outside domain of {self}")
        return TemperedPower(self.q - s, self.beta, self.delta, self.sign)

    def reflected(self) -> "TemperedPower":
        return TemperedPower(self.q, self.beta, self.delta, -self.sign)

    def upward_exp_moment_finite(self, theta: float) -> bool:
        # integral of x^{-beta} e^{(theta - q)x} diverges at theta = q for beta < 1
        return self.sign < 0 or theta < self.q

    def sample_sizes(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # Pareto proposal via inverse CDF, thinned by exp(-q (x - delta))
        out = np.empty(size)
        filled = 0
        while filled < size:
            need = size - filled
            x = self.delta * rng.random(need) ** (-1.0 / self.beta)
            if self.q > 0:
                keep = rng.random(need) < np.exp(-self.q * (x - self.delta))
                x = x[keep]
            out[filled:filled + x.size] = x
            filled += x.size
        return self.sign * out

    def to_json(self) -> dict:
        return {"type": "tempered_power", "q": self.q, "beta": self.beta,
                "delta": self.delta, "sign": "+" if self.sign > 0 else "-"}


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class LevyModel:
    """Characteristics of a (possibly killed) Levy process plus the index alpha."""

    drift: float = 0.0
    gaussian: float = 0.0
    jumps: Tuple = ()
    killing: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.gaussian < 0:
            raise ValueError("gaussian coefficient must be >= 0")
        if self.killing < 0:
            raise ValueError("killing rate must be >= 0")
        object.__setattr__(self, "jumps", tuple(self.jumps))

    # -- Laplace exponent -------------------------------------------------

    @property
    def domain_sup(self) -> float:
        return min((j.domain_sup for j in self.jumps), default=math.inf)

    @property
    def domain_inf(self) -> float:
        return max((j.domain_inf for j in self.jumps), default=-math.inf)

    @property
    def finite_at_domain_sup(self) -> bool:
        s = self.domain_sup
        if not math.isfinite(s):
            return False
        return all(j.domain_sup > s or j.finite_at_sup for j in self.jumps)

    def psi(self, lam: float) -> float:
        if lam > self.domain_sup or lam < self.domain_inf:
            return math.inf
        out = -self.killing + self.drift * lam + 0.5 * self.gaussian * lam * lam
        for j in self.jumps:
            out += j.exponent(lam)
        return out

    def psi_derivative(self, lam: float) -> float:
        out = self.drift + self.gaussian * lam
        for j in self.jumps:
            d = j.exponent_derivative(lam)
            if not math.isfinite(d):
                return d
            out += d
        return out

    def mean(self) -> float:
        """Mean displacement per unit time given survival, psi'(0)."""
        return self.psi_derivative(0.0)

    def hits_zero(self) -> bool:
        return self.killing > 0 or self.mean() < 0

    @property
    def total_jump_rate(self) -> float:
        return sum(j.intensity for j in self.jumps)

    def is_conservative(self) -> bool:
        return self.killing == 0

    def to_json(self) -> dict:
        return model_to_dict(self)


class BetaClass(enum.Enum):
    JUMP_IN_EXISTS = "jump_in_exists"
    CRITICAL = "critical"
    NEITHER = "neither"


@dataclass(frozen=True)
class CramerReport:
    domain_sup: float
    theta: Optional[float]
    psi_prime_at_theta: Optional[float]
    alpha_theta: Optional[float]
    jump_in_range: Tuple[float, float]
    continuous_extension_exists: bool
    condition4_finite: Optional[bool] = None

    def to_json(self) -> dict:
        def enc(v):
            if v is None:
                return None
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        return {
            "domain_sup": enc(self.domain_sup),
            "theta": self.theta,
            "psi_prime_at_theta": enc(self.psi_prime_at_theta),
            "alpha_theta": self.alpha_theta,
            "jump_in_range": list(self.jump_in_range),
            "continuous_extension_exists": self.continuous_extension_exists,
            "condition4_finite": self.condition4_finite,
        }


# ---------------------------------------------------------------------------
# operations


def psi(model: LevyModel, lam: float) -> float:
    """Laplace exponent; +inf encodes lam outside the finiteness domain."""
    return model.psi(lam)


def psi_derivative(model: LevyModel, lam: float) -> float:
    return model.psi_derivative(lam)


def _find_upper_sign_change(model: LevyModel, tol: float):
    """Return (lo, hi) bracketing a sign change of psi, theta for an exact
    boundary root, or None when psi stays negative on (0, sup E)."""
    sup = model.domain_sup
    if math.isfinite(sup):
        if model.finite_at_domain_sup:
            v = model.psi(sup)
            if abs(v) <= 1e-9:
                return ("boundary", sup)
            if v < 0:
                return None
            hi = sup
        else:
            # psi -> +inf as lam -> sup-; walk toward the boundary
            hi = None
            lam = sup * 0.5
            while sup - lam > 1e-14 * max(1.0, sup):
                if model.psi(lam) > 0:
                    hi = lam
                    break
                lam = sup - 0.5 * (sup - lam)
            if hi is None:
                return None
        return ("bracket", hi)
    # unbounded domain: scan geometrically; by convexity, if psi has not
    # turned positive by a huge lambda it never will
    lam = 1.0
    for _ in range(80):
        v = model.psi(lam)
        if v > 0:
            return ("bracket", lam)
        lam *= 2.0
    return None


def cramer_root(model: LevyModel, tol: float = ROOT_TOL) -> CramerReport:
    """Locate the positive root of psi (Cramer's condition) by bisection.

    psi(0) = -kappa <= 0 and psi is strictly convex, so there is at most one
    positive root; it is absent when psi stays negative up to sup E.
    """
    if not model.hits_zero():
        raise ModelDoesNotHitZero(
            "model needs killing > 0 or negative mean to hit zero")
    sup = model.domain_sup
    theta = None
    found = _find_upper_sign_change(model, tol)
    if found is not None:
        kind, val = found
        if kind == "boundary":
            theta = val
        else:
            hi = val
            lo = 0.0
            if model.killing == 0:
                # psi(0) = 0; move lo into the dip so the bracket is strict
                lo = hi * 0.5
                while model.psi(lo) >= 0:
                    lo *= 0.5
                    if lo < 1e-300:
                        break
            while hi - lo > tol or abs(model.psi(0.5 * (lo + hi))) > tol:
                mid = 0.5 * (lo + hi)
                if model.psi(mid) < 0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-17 * max(1.0, hi):
                    break
            theta = 0.5 * (lo + hi)

    inv_alpha = 1.0 / model.alpha
    upper = min(inv_alpha, theta if theta is not None else sup)
    jump_in_range = (0.0, upper)

    psi_prime = None
    alpha_theta = None
    cond4 = None
    cont = False
    if theta is not None:
        cond4 = all(j.upward_exp_moment_finite(theta) for j in model.jumps)
        psi_prime = model.psi_derivative(theta) if cond4 else math.inf
        alpha_theta = model.alpha * theta
        cont = alpha_theta < 1.0
    return CramerReport(
        domain_sup=sup,
        theta=theta,
        psi_prime_at_theta=psi_prime,
        alpha_theta=alpha_theta,
        jump_in_range=jump_in_range,
        continuous_extension_exists=cont,
        condition4_finite=cond4,
    )


def esscher(model: LevyModel, theta: float, tol: float = 1e-8) -> LevyModel:
    """Exponential tilt at the Cramer root: removes killing, shifts the drift
    by gaussian*theta and tilts every jump law; psi_tilted(lam) = psi(lam+theta)."""
    if theta == 0.0:
        if model.killing != 0:
            raise NotCramerRoot("theta=0 is a root only for conservative models")
        return model
    if theta > model.domain_sup or theta < model.domain_inf:
        raise TiltOutsideDomain(
            f"theta={theta} outside Laplace-exponent domain "
            f"({model.domain_inf}, {model.domain_sup})")
    v = model.psi(theta)
    if not math.isfinite(v):
        raise TiltOutsideDomain(f"psi({theta}) is not finite")
    if abs(v) > tol:
        raise NotCramerRoot(f"psi({theta}) = {v:g} is not 0 within {tol:g}")
    return LevyModel(
        drift=model.drift + model.gaussian * theta,
        gaussian=model.gaussian,
        jumps=tuple(j.tilted(theta) for j in model.jumps),
        killing=0.0,
        alpha=model.alpha,
    )


def dual(model: LevyModel) -> LevyModel:
    """The model of -xi: negated drift, reflected jump laws."""
    return LevyModel(
        drift=-model.drift,
        gaussian=model.gaussian,
        jumps=tuple(j.reflected() for j in model.jumps),
        killing=model.killing,
        alpha=model.alpha,
    )


def classify_beta(model: LevyModel, beta: float, tol: float = 1e-9) -> BetaClass:
    """Jump-in extension existence verdict for a candidate index beta."""
    if not 0.0 < beta < 1.0 / model.alpha:
        raise BetaOutOfRange(f"beta={beta} not in (0, {1.0 / model.alpha})")
    v = model.psi(beta)
    if math.isfinite(v) and abs(v) <= tol:
        return BetaClass.CRITICAL
    if v < 0:
        return BetaClass.JUMP_IN_EXISTS
    return BetaClass.NEITHER


def tempered_power_killing_for_root(q: float, beta: float, delta: float) -> float:
    """Killing rate that places the Cramer root of a TemperedPower(q, beta,
    delta) subordinator exactly at the domain boundary q."""
    spec = TemperedPower(q, beta, delta)
    return spec.exponent(q)


# ---------------------------------------------------------------------------
# JSON model files


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ModelFileError(f"{path}.{key}: missing required field")
    return doc[key]


def _number(doc: dict, key: str, path: str) -> float:
    v = _require(doc, key, path)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ModelFileError(f"{path}.{key}: expected a number, got {v!r}")
    return float(v)


def _sign(doc: dict, key: str, path: str) -> int:
    v = doc.get(key, "+")
    if v not in ("+", "-"):
        raise ModelFileError(f"{path}.{key}: expected '+' or '-', got {v!r}")
    return 1 if v == "+" else -1


def _law_from_dict(doc: dict, path: str):
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: expected an object")
    kind = _require(doc, "type", path)
    try:
        if kind == "exponential":
            return Exponential(_number(doc, "rate", path), _sign(doc, "sign", path))
        if kind == "two_sided_exponential":
            return TwoSidedExponential(
                _number(doc, "rate_pos", path), _number(doc, "rate_neg", path),
                _number(doc, "p_pos", path))
        if kind == "point_mass":
            return PointMass(_number(doc, "value", path))
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    raise ModelFileError(f"{path}.type: unknown jump law {kind!r}")


def _jump_from_dict(doc: dict, path: str):
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: expected an object")
    kind = _require(doc, "type", path)
    try:
        if kind == "compound_poisson":
            return CompoundPoisson(
                _number(doc, "rate", path),
                _law_from_dict(_require(doc, "law", path), f"{path}.law"))
        if kind == "tempered_power":
            return TemperedPower(
                _number(doc, "q", path), _number(doc, "beta", path),
                _number(doc, "delta", path), _sign(doc, "sign", path))
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    raise ModelFileError(f"{path}.type: unknown jump spec {kind!r}")


def model_from_dict(doc: dict, path: str = "$") -> LevyModel:
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: expected a JSON object")
    jumps = doc.get("jumps", [])
    if not isinstance(jumps, list):
        raise ModelFileError(f"{path}.jumps: expected an array")
    try:
        return LevyModel(
            drift=_number(doc, "drift", path),
            gaussian=_number(doc, "gaussian", path),
            jumps=tuple(_jump_from_dict(j, f"{path}.jumps[{i}]")
                        for i, j in enumerate(jumps)),
            killing=_number(doc, "killing", path),
            alpha=_number(doc, "alpha", path),
        )
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def model_to_dict(model: LevyModel) -> dict:
    return {
        "drift": model.drift,
        "gaussian": model.gaussian,
        "jumps": [j.to_json() for j in model.jumps],
        "killing": model.killing,
        "alpha": model.alpha,
    }


def load_model(path: str) -> LevyModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"$: invalid JSON: {exc}") from exc
    return model_from_dict(doc)
