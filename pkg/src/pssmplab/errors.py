"""Exception types shared across the package."""


class LabError(Exception):
    """Base class for all package errors."""


class ModelFileError(LabError):
    """Raised when a model JSON document is malformed; message carries the field path."""


class ModelDoesNotHitZero(LabError):
    """The associated self-similar process never hits 0 (no killing and non-negative mean)."""


class TiltOutsideDomain(LabError):
    """Esscher tilt parameter lies outside the finiteness domain of the Laplace exponent."""


class NotCramerRoot(LabError):
    """Esscher tilt requested at a point where the Laplace exponent does not vanish."""


class BetaOutOfRange(LabError):
    """Jump-in index outside (0, 1/alpha)."""


class HorizonTooShort(LabError):
    """Neither killing nor convergence was reached within the simulated horizon."""


class NotDriftingUp(LabError):
    """The (tilted) process does not drift to +infinity, so J is not finite a.s."""


class HypothesisViolated(LabError):
    """Moment requested outside the range where it is provably finite."""


class NoCramerRoot(LabError):
    """Operation requires a positive root of the Laplace exponent and none exists."""


class DerivativeInfinite(LabError):
    """One-sided derivative of the Laplace exponent diverges at the root."""


class ConfigRejected(LabError):
    """Extension configuration violates the existence conditions for the requested mode."""


class TooFewSamples(LabError):
    """Statistical test invoked with fewer samples than it supports."""


class GridTooCoarse(LabError):
    """Deterministic grid computation is not resolution-stable."""


class StartsAtZero(LabError):
    """Inverse Lamperti transform requires a strictly positive starting point."""
