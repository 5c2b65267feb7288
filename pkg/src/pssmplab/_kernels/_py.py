"""Pure-numpy window kernel, the fallback for the compiled core.

The kernel advances a batch of Gaussian (drift + Brownian) paths through one
window of at most ``m`` grid steps while accumulating the exponential
functional integral(e^{sign * xi / alpha}).  Segment integrals are exact for
the piecewise-linear path:

    integral_0^h e^{(x + c s)/a} ds = h e^{x/a} (e^{ch/a} - 1)/(ch/a).

Modes:
  STOP_AT_ZETA  -- run until the per-path stop time (killing) is reached.
  TARGET        -- additionally stop when the accumulated integral crosses a
                   per-path target; the crossing point is solved in closed
                   form and the path value at the crossing is stored in x.

Done codes written into ``done``: 0 running, 1 stopped at zeta, 2 hit target.
"""

import numpy as np

BACKEND = "python"

STOP_AT_ZETA = 0
TARGET = 2


def advance_window(x, a, t, w, done, zeta, target, normals, b, sigma, dt,
                   inv_alpha, sign, mode):
    m = normals.shape[0]
    s_ia = sign * inv_alpha
    for k in range(m):
        act = done == 0
        if not act.any():
            break
        idx = np.nonzero(act)[0]
        xi = x[idx]
        ti = t[idx]
        last = zeta[idx] - ti <= dt
        dt_eff = np.where(last, zeta[idx] - ti, dt)
        inc = b * dt_eff + sigma * np.sqrt(dt_eff) * normals[k, idx]
        u = s_ia * xi
        d = s_ia * inc
        phi = np.ones_like(d)
        nz = d != 0.0
        phi[nz] = np.expm1(d[nz]) / d[nz]
        seg = dt_eff * np.exp(u) * phi
        if mode == TARGET:
            rem = target[idx] - a[idx]
            cross = seg >= rem
            if cross.any():
                ci = idx[cross]
                xi_c = x[ci]
                dt_c = dt_eff[cross]
                c = inc[cross] / dt_c
                r = rem[cross]
                kc = s_ia * c
                eu = np.exp(-s_ia * xi_c)
                small = np.abs(kc) * dt_c < 1e-14
                s_star = np.where(
                    small,
                    r * eu,
                    np.log1p(np.where(small, 0.0, r * kc * eu)) /
                    np.where(small, 1.0, kc),
                )
                x[ci] = xi_c + c * s_star
                t[ci] += s_star
                a[ci] = target[ci]
                done[ci] = 2
                keep = ~cross
                idx = idx[keep]
                if idx.size == 0:
                    continue
                seg = seg[keep]
                inc = inc[keep]
                dt_eff = dt_eff[keep]
                last = last[keep]
        a[idx] += seg
        w[idx] += seg
        x[idx] += inc
        t[idx] += dt_eff
        if last.any():
            li = idx[last]
            t[li] = zeta[li]
            done[li] = 1
    return None
