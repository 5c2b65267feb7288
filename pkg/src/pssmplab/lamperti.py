"""Lamperti transformation between Levy paths and positive self-similar paths.

Forward direction: given a path of xi and a starting point x0 > 0, the clock

    A(s) = integral_0^s e^{xi_r / alpha} dr

is computed exactly segment by segment (xi is piecewise linear between the
recorded points), and the self-similar path is read off as

    X_u = x0 * exp(xi_{tau(u * x0^{-1/alpha})}),   tau = right-continuous
                                                   inverse of A,

sampled at the image times u_i = x0^{1/alpha} * A(s_i).  The first hitting
time of 0 is t0 = x0^{1/alpha} * A(zeta) for killed paths, and the limit of
x0^{1/alpha} * A for conservative paths whose clock converges within the
horizon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import segment_exp_integral, marginal_batch, HIT
from .errors import HorizonTooShort, StartsAtZero
from .models import LevyModel
from .paths import LevyPath, SimConfig, sample_levy_path, stream_rng

__all__ = ["PssmpPath", "levy_to_pssmp", "pssmp_to_levy",
           "hitting_time_samples", "pssmp_marginal"]

_TAIL_WINDOW = 4.0


@dataclass
class PssmpPath:
    """Positive self-similar path sampled at the image times of the clock.

    ``t0`` is the first hitting time of 0 when it was reached (by killing or
    by clock convergence); ``values[-1]`` is then the left limit X_{t0-}.
    """

    times: np.ndarray
    values: np.ndarray
    t0: Optional[float]
    x0: float
    alpha: float
    truncated: bool = False

    def to_json_record(self) -> str:
        return json.dumps({
            "t": self.times.tolist(),
            "x": self.values.tolist(),
            "t0": self.t0,
            "x0": self.x0,
        })


def _clock_increments(path: LevyPath, alpha: float) -> np.ndarray:
    left = path.left_limits()
    gaps = np.diff(path.times)
    return segment_exp_integral(path.values[:-1], left[1:] - path.values[:-1],
                                gaps, 1.0 / alpha)


def levy_to_pssmp(path: LevyPath, x0: float, alpha: float,
                  rel_tol: float = 1e-6,
                  allow_truncated: bool = False) -> PssmpPath:
    """Map a Levy path to the self-similar path started at x0."""
    if x0 <= 0:
        raise ValueError("x0 must be > 0")
    segs = _clock_increments(path, alpha)
    clock = np.concatenate(([0.0], np.cumsum(segs)))
    scale = x0 ** (1.0 / alpha)
    times = scale * clock
    values = x0 * np.exp(path.values)

    if path.zeta is not None:
        return PssmpPath(times=times, values=values, t0=float(times[-1]),
                         x0=x0, alpha=alpha)
    # conservative path: the clock converges iff the tail window is negligible
    tail = segs[path.times[1:] > path.times[-1] - _TAIL_WINDOW].sum()
    if tail < rel_tol * clock[-1]:
        return PssmpPath(times=times, values=values, t0=float(times[-1]),
                         x0=x0, alpha=alpha)
    if allow_truncated:
        return PssmpPath(times=times, values=values, t0=None, x0=x0,
                         alpha=alpha, truncated=True)
    raise HorizonTooShort(
        "path neither killed nor clock-convergent within the horizon")


def pssmp_to_levy(path: PssmpPath) -> LevyPath:
    """Invert levy_to_pssmp: recover xi and its own time scale.

    The path is read as the image of a piecewise-linear xi, so each segment
    duration follows from the closed-form clock increment:

        du = x0^{1/alpha} * ds * (e^{b/alpha} - e^{a/alpha}) / ((b - a)/alpha).
    """
    x0 = float(path.values[0])
    if x0 == 0:
        raise StartsAtZero("cannot invert a path started at 0")
    pos = path.values > 0
    values = path.values[pos]
    times = path.times[pos]
    xi = np.log(values / x0)
    inv_alpha = 1.0 / path.alpha
    scale = x0 ** inv_alpha

    du = np.diff(times) / scale
    a, b = xi[:-1], xi[1:]
    diff = (b - a) * inv_alpha
    ea = np.exp(a * inv_alpha)
    # du = ds * ea * (e^{diff} - 1)/diff  =>  ds = du / (ea * phi)
    phi = np.ones_like(diff)
    nz = diff != 0.0
    phi[nz] = np.expm1(diff[nz]) / diff[nz]
    ds = du / (ea * phi)
    s = np.concatenate(([0.0], np.cumsum(ds)))
    zeta = float(s[-1]) if path.t0 is not None else None
    return LevyPath(times=s, values=xi, pre_jump=np.full(s.size, np.nan),
                    zeta=zeta, truncated=path.t0 is None)


def hitting_time_samples(model: LevyModel, x0: float, n: int,
                         config: SimConfig):
    """n independent draws of the first hitting time of 0 under P_{x0}.

    Each draw is produced pathwise (one Levy path, one clock), so the identity
    t0 = x0^{1/alpha} * I holds exactly on the shared randomness.  Returns
    (values, censored); censored draws carry the clock value reached at the
    horizon, a lower bound for t0.
    """
    out = np.empty(n)
    censored = np.zeros(n, bool)
    rng = config.rng()
    for i in range(n):
        path = sample_levy_path(model, config, rng=rng)
        ps = levy_to_pssmp(path, x0, model.alpha, allow_truncated=True)
        if ps.t0 is None:
            out[i] = ps.times[-1]
            censored[i] = True
        else:
            out[i] = ps.t0
    return out, censored


def pssmp_marginal(model: LevyModel, x0: float, t: float, n: int,
                   config: SimConfig,
                   rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """n draws of X_t under P_{x0}; 0 where the path was absorbed before t."""
    if x0 <= 0:
        raise ValueError("x0 must be > 0")
    if rng is None:
        rng = config.rng()
    target = t * x0 ** (-1.0 / model.alpha)
    batch = marginal_batch(model, np.full(n, target), rng, config)
    out = np.where(batch.status == HIT, x0 * np.exp(batch.xi), 0.0)
    return out
