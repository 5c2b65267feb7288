"""Reference model catalog used by the tests and the default CLI suite."""

from __future__ import annotations

from .models import (
    CompoundPoisson,
    LevyModel,
    TemperedPower,
    TwoSidedExponential,
    tempered_power_killing_for_root,
)

__all__ = ["brownian", "two_sided", "killed_drift", "pure_drift",
           "boundary_root"]


def brownian() -> LevyModel:
    """Killed standard Brownian motion; theta = 1/2, psi'(theta) = 1/2."""
    return LevyModel(drift=0.0, gaussian=1.0, jumps=(), killing=0.125,
                     alpha=1.0)


def two_sided() -> LevyModel:
    """Killed drift plus two-sided exponential jumps; exact event-driven
    simulation (no time-discretization error)."""
    return LevyModel(
        drift=-1.0, gaussian=0.0,
        jumps=(CompoundPoisson(rate=1.0,
                               law=TwoSidedExponential(rate_pos=2.0,
                                                       rate_neg=1.0,
                                                       p_pos=0.5)),),
        killing=1.0 / 3.0, alpha=0.5)


def killed_drift(rate: float = 0.5) -> LevyModel:
    """Killed unit downward drift: no Cramer root, every jump-in index works."""
    return LevyModel(drift=-1.0, gaussian=0.0, jumps=(), killing=rate,
                     alpha=1.0)


def pure_drift(alpha: float = 1.0) -> LevyModel:
    """Conservative unit downward drift: I = alpha exactly."""
    return LevyModel(drift=-1.0, gaussian=0.0, jumps=(), killing=0.0,
                     alpha=alpha)


def boundary_root(q: float = 1.0, beta: float = 0.75, delta: float = 0.01,
                  alpha: float = 0.5) -> LevyModel:
    """Killed tempered-power subordinator whose Cramer root sits exactly at
    the edge of the Laplace-exponent domain, so psi'_-(theta) diverges.

    alpha defaults to 0.5 so that alpha * theta < 1 and the continuous
    extension exists despite the failing derivative condition.
    """
    kappa = tempered_power_killing_for_root(q, beta, delta)
    return LevyModel(drift=0.0, gaussian=0.0,
                     jumps=(TemperedPower(q=q, beta=beta, delta=delta),),
                     killing=kappa, alpha=alpha)
