"""Bessel functions of the first kind and their positive zeros.

Zeros are located by scanning for sign changes (consecutive zeros of J_nu are
more than 2.4 apart for nu >= 0, so a 0.5 scan cannot skip one), seeded with
McMahon's expansion and polished by Newton steps kept inside the bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


class BesselError(ValueError):
    pass


class BesselConvergenceError(RuntimeError):
    def __init__(self, msg, bracket):
        super().__init__(f"{msg}; last bracket [{bracket[0]!r}, {bracket[1]!r}]")
        self.bracket = bracket


@dataclass(frozen=True)
class BesselZero:
    order: float
    index: int
    value: float


_SCAN_STEP = 0.5
_NEWTON_MAX = 50


def bessel_order(n: int, m: int) -> float:
    """Order m + (n - 2)/2 attached to angular index m in dimension n."""
    return m + (n - 2) / 2.0


def bessel_j(nu: float, x):
    """J_nu(x) for nu >= 0, x >= 0. Accepts scalars or arrays."""
    if nu < 0:
        raise BesselError(f"order must be >= 0, got {nu}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise BesselError("argument must be >= 0")
    out = special.jv(nu, xa)
    return float(out) if out.ndim == 0 else out


def bessel_jp(nu: float, x):
    """Derivative dJ_nu/dx."""
    out = special.jvp(nu, np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def mcmahon_guess(nu: float, l: int) -> float:
    beta = (l + nu / 2.0 - 0.25) * math.pi
    mu = 4.0 * nu * nu
    e = 8.0 * beta
    return (beta
            - (mu - 1) / e
            - 4 * (mu - 1) * (7 * mu - 31) / (3 * e**3)
            - 32 * (mu - 1) * (83 * mu**2 - 982 * mu + 3779) / (15 * e**5))


def _sign_brackets(nu: float, count: int, x_hint: float):
    """First `count` sign-change intervals of J_nu on (0, inf)."""
    # J_nu > 0 on (0, j_1) and j_1 > nu
    x0 = nu if nu > 0 else 0.0
    hi = max(x_hint, x0 + 4.0) + 4.0
    while True:
        xs = np.arange(x0, hi + _SCAN_STEP, _SCAN_STEP)
        if nu > 0:
            xs[0] = x0 + 1e-3 if x0 == 0 else x0
        vals = special.jv(nu, xs)
        s = np.sign(vals)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if len(idx) >= count:
            return [(xs[i], xs[i + 1], vals[i]) for i in idx[:count]]
        hi *= 1.5


def _refine(nu, a, b, fa, guess):
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(_NEWTON_MAX):
        fx = float(special.jv(nu, x))
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b = x
        dfx = float(special.jvp(nu, x))
        step = fx / dfx if dfx != 0 else math.inf
        xn = x - step
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 4e-16 * abs(x):
            return xn
        x = xn
    raise BesselConvergenceError(f"Newton failed for nu={nu}", (a, b))


def bessel_zero(nu: float, l: int) -> BesselZero:
    """l-th positive zero of J_nu."""
    if nu < 0:
        raise BesselError(f"order must be >= 0, got {nu}")
    if l < 1:
        raise BesselError(f"zero index must be >= 1, got {l}")
    guess = mcmahon_guess(nu, l)
    a, b, fa = _sign_brackets(nu, l, guess)[l - 1]
    value = _refine(nu, a, b, fa, guess)
    res = abs(float(special.jv(nu, value)))
    if res > 1e-11 * max(1.0, abs(float(special.jvp(nu, value)))):
        raise BesselConvergenceError(f"residual {res:.3e} too large", (a, b))
    return BesselZero(float(nu), int(l), value)


def bessel_zeros(nu: float, count: int) -> np.ndarray:
    """First `count` positive zeros of J_nu."""
    brackets = _sign_brackets(nu, count, mcmahon_guess(nu, count))
    out = np.empty(count)
    for i, (a, b, fa) in enumerate(brackets):
        out[i] = _refine(nu, a, b, fa, mcmahon_guess(nu, i + 1))
    return out


def euclidean_eigenvalue(n: int, m: int, l: int, r0: float) -> float:
    """Dirichlet eigenvalue (j^l_{m+n/2-1} / r0)^2 of a Euclidean ball."""
    if n < 2 or m < 0 or l < 1 or not r0 > 0:
        raise BesselError(f"invalid indices n={n}, m={m}, l={l}, r0={r0}")
    j = bessel_zero(bessel_order(n, m), l).value
    return (j / r0) ** 2
