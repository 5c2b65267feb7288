"""Seeded, reproducible sample paths of the killed Levy process.

Randomness contract: the generator for (seed, stream_id) is a Philox
counter-based bit generator keyed by the 128-bit word (seed, stream_id), so
distinct stream ids give statistically independent streams and results do not
depend on thread scheduling.  Within one path the draw order is fixed:
killing time, then per-jump-component event times and sizes, then the
Gaussian grid increments.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .models import LevyModel

__all__ = ["SimConfig", "LevyPath", "stream_rng", "sample_levy_path",
           "sample_increment_batch"]


def stream_rng(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for one worker stream (counter-based split)."""
    if stream_id < 0:
        raise ValueError("stream_id must be >= 0")
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream_id)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    horizon: float = 400.0
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.dt > self.horizon:
            raise ValueError("dt must not exceed horizon")

    def rng(self) -> np.random.Generator:
        return stream_rng(self.seed, self.stream_id)

    def substream(self, offset: int) -> "SimConfig":
        return replace(self, stream_id=self.stream_id + offset)


@dataclass
class LevyPath:
    """Discretized path of xi.  ``values`` holds the post-jump value at each
    time; where ``pre_jump`` is not NaN the left limit at that time differs
    (a jump landed there) and segments interpolate to the left limit."""

    times: np.ndarray
    values: np.ndarray
    pre_jump: np.ndarray
    zeta: Optional[float]
    truncated: bool

    def left_limits(self) -> np.ndarray:
        """Value of xi just before each grid time."""
        out = self.values.copy()
        mask = ~np.isnan(self.pre_jump)
        out[mask] = self.pre_jump[mask]
        return out

    def to_json_record(self) -> str:
        return json.dumps({
            "t": self.times.tolist(),
            "x": self.values.tolist(),
            "zeta": self.zeta,
        })


def sample_levy_path(model: LevyModel, config: SimConfig,
                     rng: Optional[np.random.Generator] = None) -> LevyPath:
    """One path on [0, min(horizon, zeta)].

    Gaussian increments are exact over each inter-point gap; jump times are
    drawn from their exponential clocks and inserted into the grid exactly
    (not rounded), which the Lamperti time change depends on.
    """
    if rng is None:
        rng = config.rng()
    zeta = rng.exponential(1.0 / model.killing) if model.killing > 0 else math.inf
    t_end = min(config.horizon, zeta)
    killed = zeta <= config.horizon
    truncated = not killed

    jump_times = []
    jump_sizes = []
    for spec in model.jumps:
        count = rng.poisson(spec.intensity * t_end)
        times = np.sort(rng.random(count) * t_end)
        sizes = spec.sample_sizes(rng, count)
        jump_times.append(times)
        jump_sizes.append(sizes)

    n_grid = int(math.ceil(t_end / config.dt))
    grid = np.unique(np.minimum(np.arange(n_grid + 1) * config.dt, t_end))
    if grid[-1] < t_end:
        grid = np.append(grid, t_end)

    if jump_times:
        jt = np.concatenate(jump_times)
        js = np.concatenate(jump_sizes)
        order = np.argsort(jt, kind="stable")
        jt, js = jt[order], js[order]
        # drop (measure-zero) collisions with grid points or with each other
        keep = ~np.isin(jt, grid)
        if jt.size > 1:
            keep &= np.concatenate(([True], np.diff(jt) > 0))
        jt, js = jt[keep], js[keep]
    else:
        jt = np.empty(0)
        js = np.empty(0)

    times = np.concatenate((grid, jt))
    order = np.argsort(times, kind="stable")
    times = times[order]
    is_jump = np.concatenate((np.zeros(grid.size, bool), np.ones(jt.size, bool)))[order]
    sizes = np.zeros(times.size)
    sizes[is_jump] = js

    gaps = np.diff(times)
    incs = model.drift * gaps
    if model.gaussian > 0:
        incs = incs + math.sqrt(model.gaussian) * np.sqrt(gaps) * \
            rng.standard_normal(gaps.size)
    left = np.concatenate(([0.0], np.cumsum(incs + sizes[1:]) - sizes[1:]))
    values = left + sizes
    pre_jump = np.full(times.size, np.nan)
    pre_jump[is_jump] = left[is_jump]

    return LevyPath(times=times, values=values, pre_jump=pre_jump,
                    zeta=zeta if killed else None, truncated=truncated)


def sample_increment_batch(model: LevyModel, t: float, n: int,
                           config: SimConfig,
                           rng: Optional[np.random.Generator] = None):
    """n independent draws of xi_t together with a killed-before-t flag.

    The Gaussian part is accumulated over the dt grid (exact increments, so
    the law does not depend on dt); jump totals are exact Poisson sums.
    Returns (values, killed) where values[killed] are left in place but only
    surviving draws enter E(e^{lam xi_t}, t < zeta) estimates.
    """
    if t > config.horizon:
        raise ValueError("t must not exceed the configured horizon")
    if rng is None:
        rng = config.rng()
    if model.killing > 0:
        killed = rng.exponential(1.0 / model.killing, n) < t
    else:
        killed = np.zeros(n, bool)

    n_steps = max(1, int(math.ceil(t / config.dt)))
    gaps = np.full(n_steps, config.dt)
    gaps[-1] = t - config.dt * (n_steps - 1)
    values = np.full(n, model.drift * t)
    if model.gaussian > 0:
        z = rng.standard_normal((n_steps, n))
        values = values + math.sqrt(model.gaussian) * (np.sqrt(gaps) @ z)
    for spec in model.jumps:
        counts = rng.poisson(spec.intensity * t, n)
        total = int(counts.sum())
        if total:
            sizes = spec.sample_sizes(rng, total)
            idx = np.repeat(np.arange(n), counts)
            values = values + np.bincount(idx, weights=sizes, minlength=n)
    return values, killed
