# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled window kernel; see _py.py for the reference semantics."""

from libc.math cimport exp, expm1, log1p, sqrt, fabs

BACKEND = "cython"

STOP_AT_ZETA = 0
TARGET = 2


def advance_window(double[::1] x, double[::1] a, double[::1] t, double[::1] w,
                   unsigned char[::1] done, double[::1] zeta,
                   double[::1] target, double[:, ::1] normals,
                   double b, double sigma, double dt,
                   double inv_alpha, double sign, int mode):
    cdef Py_ssize_t m = normals.shape[0]
    cdef Py_ssize_t n = normals.shape[1]
    cdef Py_ssize_t i, k
    cdef double s_ia = sign * inv_alpha
    cdef double dt_eff, inc, u, d, phi, seg, rem, c, kc, eu, s_star
    cdef bint last
    for i in range(n):
        if done[i] != 0:
            continue
        for k in range(m):
            last = zeta[i] - t[i] <= dt
            dt_eff = zeta[i] - t[i] if last else dt
            inc = b * dt_eff + sigma * sqrt(dt_eff) * normals[k, i]
            u = s_ia * x[i]
            d = s_ia * inc
            phi = 1.0 if d == 0.0 else expm1(d) / d
            seg = dt_eff * exp(u) * phi
            if mode == 2:
                rem = target[i] - a[i]
                if seg >= rem:
                    c = inc / dt_eff
                    kc = s_ia * c
                    eu = exp(-s_ia * x[i])
                    if fabs(kc) * dt_eff < 1e-14:
                        s_star = rem * eu
                    else:
                        s_star = log1p(rem * kc * eu) / kc
                    x[i] = x[i] + c * s_star
                    t[i] = t[i] + s_star
                    a[i] = target[i]
                    done[i] = 2
                    break
            a[i] += seg
            w[i] += seg
            x[i] += inc
            t[i] += dt_eff
            if last:
                t[i] = zeta[i]
                done[i] = 1
                break
    return None
