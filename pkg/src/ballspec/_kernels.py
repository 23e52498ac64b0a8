"""Compiled inner loops: warp evaluation, Pruefer right-hand side, DOPRI5.

Warp parameter layout (float64 array ``wp``)::

    wp[0] = kind   (0: model space sin_K, 1: odd polynomial)
    wp[1] = K      (kind 0)
    wp[1] = ncoef, wp[2:2+ncoef] = c1, c3, c5, ...   (kind 1)

Phase parameters ``par`` = [lam, sqrt(lam), mu, n] followed by ``wp``.
"""
import math

import numpy as np
from numba import njit

MODEL = 0.0
POLY = 1.0

_SERIES_X = 1e-4

# Dormand-Prince 5(4) with the quartic dense output of Shampine (1986).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200,
               -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@njit(cache=True, nogil=True)
def sin_k_scalar(K, r):
    x = K * r * r
    if K == 0.0:
        return r
    if abs(x) < _SERIES_X:
        return r * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0 * (
            1.0 - x / 72.0 * (1.0 - x / 110.0)))))
    if K > 0.0:
        s = math.sqrt(K)
        return math.sin(s * r) / s
    s = math.sqrt(-K)
    return math.sinh(s * r) / s


@njit(cache=True, nogil=True)
def cos_k_scalar(K, r):
    x = K * r * r
    if K == 0.0:
        return 1.0
    if abs(x) < _SERIES_X:
        return 1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (
            1.0 - x / 56.0 * (1.0 - x / 90.0))))
    if K > 0.0:
        return math.cos(math.sqrt(K) * r)
    return math.cosh(math.sqrt(-K) * r)


@njit(cache=True, nogil=True)
def warp_f_f1(wp, off, r):
    """(f(r), f'(r)) for the warp encoded at ``wp[off:]``."""
    if wp[off] == MODEL:
        K = wp[off + 1]
        return sin_k_scalar(K, r), cos_k_scalar(K, r)
    nc = int(wp[off + 1])
    r2 = r * r
    f = 0.0
    f1 = 0.0
    for k in range(nc - 1, -1, -1):
        c = wp[off + 2 + k]
        f = f * r2 + c
        f1 = f1 * r2 + (2 * k + 1) * c
    return f * r, f1


@njit(cache=True, nogil=True)
def phase_rhs(r, y, par):
    """Modified Pruefer system for (f^{n-1} R')' + (lam f^{n-1} - mu f^{n-3}) R = 0.

    With S = sqrt(lam) f^{n-1}:  sqrt(lam) f^{n-1} R = rho sin(theta),
    f^{n-1} R' = rho cos(theta).  y = (theta, log rho).
    """
    sl = par[1]
    mu = par[2]
    nm1 = par[3] - 1.0
    f, f1 = warp_f_f1(par, 4, r)
    st = math.sin(y[0])
    ct = math.cos(y[0])
    a = mu / (sl * f * f)
    b = nm1 * f1 / f
    out = np.empty(2)
    out[0] = sl - a * st * st + b * st * ct
    out[1] = b * st * st + a * st * ct
    return out


@njit(cache=True, nogil=True)
def dopri5(rhs, par, r0, r1, y0, rtol, atol, h0, dense, max_steps):
    """Adaptive Dormand-Prince 5(4) from r0 to r1 (r1 > r0).

    Returns (y_end, nsteps, ts, ys, qs, ok). With ``dense`` the step
    endpoints ``ts``/``ys`` and quartic coefficients ``qs[i] = h * K^T P``
    are recorded so y(ts[i] + s*h) = ys[i] + qs[i] @ [s, s^2, s^3, s^4].
    """
    d = y0.shape[0]
    cap = max_steps + 1 if dense else 1
    ts = np.empty(cap)
    ys = np.empty((cap, d))
    qs = np.empty((cap, d, 4))
    K = np.empty((7, d))
    y = y0.copy()
    r = r0
    h = min(h0, r1 - r0)
    K[0] = rhs(r, y, par)
    if dense:
        ts[0] = r
        ys[0] = y
    nsteps = 0
    nrej = 0
    while r < r1:
        if nsteps >= max_steps or nrej > 10 * max_steps:
            return y, nsteps, ts, ys, qs, False
        last = False
        if r + h >= r1 or r + 1.0001 * h >= r1:
            h = r1 - r
            last = True
        for s in range(1, 6):
            dy = np.zeros(d)
            for j in range(s):
                dy += _A[s, j] * K[j]
            K[s] = rhs(r + _C[s] * h, y + h * dy, par)
        yn = y.copy()
        for j in range(6):
            yn += h * _B[j] * K[j]
        K[6] = rhs(r + h, yn, par)
        err = 0.0
        for i in range(d):
            e = 0.0
            for j in range(7):
                e += _E[j] * K[j, i]
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (h * e / sc) ** 2
        err = math.sqrt(err / d)
        if err <= 1.0:
            if dense:
                for i in range(d):
                    for p in range(4):
                        acc = 0.0
                        for j in range(7):
                            acc += K[j, i] * _P[j, p]
                        qs[nsteps, i, p] = h * acc
            r = r1 if last else r + h
            y = yn
            K[0] = K[6]
            nsteps += 1
            if dense:
                ts[nsteps] = r
                ys[nsteps] = y
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** -0.2)
            h *= fac
        else:
            nrej += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < 1e-14 * max(abs(r), 1e-300):
                return y, nsteps, ts, ys, qs, False
    return y, nsteps, ts[:nsteps + 1], ys[:nsteps + 1], qs[:nsteps], True


@njit(cache=True, nogil=True)
def dense_eval(ts, ys, qs, x):
    """Evaluate a recorded dense output at sorted points x."""
    n = x.shape[0]
    d = ys.shape[1]
    out = np.empty((n, d))
    k = 0
    nseg = qs.shape[0]
    for i in range(n):
        while k < nseg - 1 and x[i] > ts[k + 1]:
            k += 1
        h = ts[k + 1] - ts[k]
        s = (x[i] - ts[k]) / h
        for j in range(d):
            q = qs[k, j]
            out[i, j] = ys[k, j] + s * (q[0] + s * (q[1] + s * (q[2] + s * q[3])))
    return out
