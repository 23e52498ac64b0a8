"""Spherically symmetric geometries ds^2 = dr^2 + f(r)^2 g_{S^{n-1}}.

A geometry is a dimension together with a warping profile f. Constant
curvature K gives f = sin_K. Custom profiles are either odd polynomials
(serialisable, usable by the compiled solver) or plain callables.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from ._kernels import MODEL, POLY

RHO_CAP = 1e6

_SERIES_X = 1e-4        # sin_k / cos_k Taylor branch
_EXCESS_SERIES_X = 0.5  # sin_K - r cos_K and r - sin_K Taylor branch
_EXCESS_TERMS = 14


class GeometryError(ValueError):
    pass


def _check_radius(K, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise GeometryError("radius must be >= 0")
    if K > 0 and np.any(r > math.pi / math.sqrt(K) * (1 + 1e-15)):
        raise GeometryError(f"radius exceeds model domain pi/sqrt(K) = {math.pi / math.sqrt(K)!r}")
    return r


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def sin_k(K: float, r):
    """sin(r sqrt K)/sqrt K, r, or sinh(r sqrt -K)/sqrt -K."""
    r = _check_radius(K, r)
    if K == 0:
        return _out(r.copy())
    x = K * r * r
    s = math.sqrt(abs(K))
    with np.errstate(over="ignore"):
        direct = np.sin(s * r) / s if K > 0 else np.sinh(s * r) / s
    series = r * (1 - x / 6 * (1 - x / 20 * (1 - x / 42 * (1 - x / 72 * (1 - x / 110)))))
    return _out(np.where(np.abs(x) < _SERIES_X, series, direct))


def cos_k(K: float, r):
    """Derivative of sin_k in r."""
    r = _check_radius(K, r)
    if K == 0:
        return _out(np.ones_like(r))
    x = K * r * r
    s = math.sqrt(abs(K))
    with np.errstate(over="ignore"):
        direct = np.cos(s * r) if K > 0 else np.cosh(s * r)
    series = 1 - x / 2 * (1 - x / 12 * (1 - x / 30 * (1 - x / 56 * (1 - x / 90))))
    return _out(np.where(np.abs(x) < _SERIES_X, series, direct))


def _taylor_sum(x, coef):
    # sum_k coef[k] x^k via Horner
    acc = np.zeros_like(x)
    for c in coef[::-1]:
        acc = acc * x + c
    return acc


def _excess_coefs(kind):
    # sin_K - r cos_K = r^3 sum_{k>=1} -2k (-K)^k r^{2k-2}/(2k+1)!   (kind "g")
    # r - sin_K       = r^3 sum_{k>=1}   -(-K)^k r^{2k-2}/(2k+1)!   (kind "h")
    out = []
    for k in range(1, _EXCESS_TERMS + 1):
        w = 2 * k if kind == "g" else 1
        out.append(-w * (-1) ** k / math.factorial(2 * k + 1))
    return out


_G_COEF = _excess_coefs("g")
_H_COEF = _excess_coefs("h")


def sin_k_excess(K: float, r):
    """sin_K(r) - r cos_K(r), free of cancellation for small K r^2."""
    r = _check_radius(K, r)
    if K == 0:
        return _out(np.zeros_like(r))
    x = K * r * r
    # coefficient of r^{2k+1} carries K^k: factor K out of the series
    series = K * r**3 * _taylor_sum(x, _G_COEF)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = sin_k(K, r) - r * cos_k(K, r)
    return _out(np.where(np.abs(x) < _EXCESS_SERIES_X, series, direct))


def g_profile(K: float, r):
    """G(r) = (sin_K - r cos_K)/sin_K^3; tends to +K/3 as r -> 0."""
    r = _check_radius(K, r)
    if np.any(r <= 0):
        raise GeometryError("g_profile needs r > 0")
    with np.errstate(over="ignore", invalid="ignore"):
        s = sin_k(K, r)
        ratio = sin_k_excess(K, r) / s**3
    if K < 0:
        ratio = np.where(np.isfinite(s) & (s < 1e100), ratio, 0.0)
    return _out(ratio)


def h_profile(K: float, r):
    """1/sin_K(r)^2 - 1/r^2; increasing, tends to K/3 as r -> 0."""
    r = _check_radius(K, r)
    if np.any(r <= 0):
        raise GeometryError("h_profile needs r > 0")
    if K == 0:
        return _out(np.zeros_like(r))
    x = K * r * r
    with np.errstate(over="ignore", invalid="ignore"):
        s = sin_k(K, r)
        d_series = K * r**3 * _taylor_sum(x, _H_COEF)
        d = np.where(np.abs(x) < _EXCESS_SERIES_X, d_series, r - s)
        # factored so r^2 s^2 never forms (overflow for huge r)
        val = (d / r / s) * (1.0 / s + 1.0 / r)
        val = np.where(np.isfinite(s), val, -1.0 / (r * r))
    return _out(val)


# ---------------------------------------------------------------------------
# warp profiles

def _fd_derivative(fun, order):
    # fourth-order central stencils; step grows with derivative order to keep
    # roundoff (eps/h^order) below truncation (h^4)
    h = {1: 1e-4, 2: 1e-3, 3: 5e-3}[order]

    def d(r):
        r = np.asarray(r, dtype=float)
        fm2, fm1, fp1, fp2 = (fun(r + k * h) for k in (-2, -1, 1, 2))
        if order == 1:
            v = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        elif order == 2:
            v = (-fm2 + 16 * fm1 - 30 * fun(r) + 16 * fp1 - fp2) / (12 * h * h)
        else:
            fm3, fp3 = fun(r - 3 * h), fun(r + 3 * h)
            v = (fm3 - 8 * fm2 + 13 * fm1 - 13 * fp1 + 8 * fp2 - fp3) / (8 * h**3)
        return _out(v)
    return d


@dataclass(frozen=True)
class WarpProfile:
    """Warping function f and its first three derivatives on [0, rho)."""

    f: Callable
    f1: Callable
    f2: Callable
    f3: Callable
    rho: float
    kind: str = "callable"
    K: Optional[float] = None
    coeffs: Optional[tuple] = None

    def kernel_params(self) -> Optional[np.ndarray]:
        """Parameter block for the compiled solver, or None for callables."""
        if self.kind == "model":
            return np.array([MODEL, float(self.K)])
        if self.kind == "poly":
            return np.array([POLY, float(len(self.coeffs)), *self.coeffs])
        return None

    @property
    def third_taylor(self) -> float:
        """Coefficient c3 in f(r) = r + c3 r^3 + O(r^5)."""
        if self.kind == "model":
            return -self.K / 6.0
        if self.kind == "poly":
            return self.coeffs[1] if len(self.coeffs) > 1 else 0.0
        return float(self.f3(0.0)) / 6.0


@dataclass(frozen=True)
class Geometry:
    n: int
    warp: WarpProfile
    curvature: Optional[float] = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise GeometryError(f"dimension must be an integer >= 2, got {self.n}")

    @property
    def rho(self) -> float:
        return self.warp.rho

    @property
    def is_model(self) -> bool:
        return self.curvature is not None

    @property
    def profile_id(self) -> str:
        if self.is_model:
            return repr(float(self.curvature))
        return self.label or "custom"

    def to_dict(self) -> dict:
        if self.warp.kind == "model":
            return {"type": "model", "K": self.curvature, "n": self.n}
        if self.warp.kind == "poly":
            return {"type": "custom", "n": self.n, "rho": self.rho,
                    "f_poly": list(self.warp.coeffs)}
        raise GeometryError("callable warps have no JSON form")

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def model_warp(K: float, n: int, rho_cap: float = RHO_CAP) -> Geometry:
    """Constant-curvature model space of dimension n."""
    K = float(K)
    rho = math.pi / math.sqrt(K) if K > 0 else float(rho_cap)
    warp = WarpProfile(
        f=lambda r: sin_k(K, r),
        f1=lambda r: cos_k(K, r),
        f2=lambda r: -K * sin_k(K, r),
        f3=lambda r: -K * cos_k(K, r),
        rho=rho, kind="model", K=K)
    return Geometry(int(n), warp, curvature=K)


def poly_warp(n: int, rho: float, coeffs) -> Geometry:
    """f(r) = c1 r + c3 r^3 + c5 r^5 + ... with c1 = 1."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs or coeffs[0] != 1.0:
        raise GeometryError("f_poly must start with c1 = 1")
    if not rho > 0:
        raise GeometryError("rho must be positive")
    full = np.zeros(2 * len(coeffs))
    full[1::2] = coeffs
    derivs = [full]
    for _ in range(3):
        derivs.append(P.polyder(derivs[-1]))
    fs = [lambda r, c=c: _out(P.polyval(np.asarray(r, dtype=float), c)) for c in derivs]
    warp = WarpProfile(*fs, rho=float(rho), kind="poly", coeffs=coeffs)
    geom = Geometry(int(n), warp)
    check_warp(warp)
    return geom


def callable_warp(n: int, rho: float, f, f1=None, f2=None, f3=None, label="custom") -> Geometry:
    """Geometry from a user-supplied warp; missing derivatives use finite differences.

    Finite differences evaluate f slightly outside [0, rho), so f must accept
    small negative arguments (odd extension).
    """
    warp = WarpProfile(
        f=f,
        f1=f1 or _fd_derivative(f, 1),
        f2=f2 or _fd_derivative(f, 2),
        f3=f3 or _fd_derivative(f, 3),
        rho=float(rho))
    check_warp(warp)
    return Geometry(int(n), warp, label=label)


def check_warp(warp: WarpProfile, samples: int = 512):
    """Raise GeometryError unless f(0)=0, f'(0)=1, f''(0)=0 and f > 0 on (0, rho)."""
    eps = 1e-8
    if abs(warp.f(eps) / eps - 1) > 1e-6 or abs(warp.f1(eps) - 1) > 1e-6:
        raise GeometryError("warp must satisfy f(0)=0, f'(0)=1")
    if abs(warp.f2(eps)) > 1e-5:
        raise GeometryError("warp must satisfy f''(0)=0")
    top = min(warp.rho, 50.0)
    r = np.linspace(0, top, samples + 1)[1:-1]
    if np.any(np.asarray(warp.f(r)) <= 0):
        raise GeometryError("warp must be positive on (0, rho)")


def derivative_defect(warp: WarpProfile, r) -> np.ndarray:
    """Max relative mismatch between supplied derivatives and central differences of f."""
    r = np.asarray(r, dtype=float)
    out = []
    for order, g in ((1, warp.f1), (2, warp.f2), (3, warp.f3)):
        fd = np.asarray(_fd_derivative(warp.f, order)(r))
        ex = np.asarray(g(r))
        out.append(np.max(np.abs(fd - ex) / np.maximum(1.0, np.abs(ex))))
    return np.array(out)


# ---------------------------------------------------------------------------
# curvature profiles

def curvature_profile_direct(n, f, f1, f2, f3, r):
    """F(r) straight from its defining formula; loses digits like 1/r^2 near 0."""
    return (n - 1) / f**3 * ((3 - n) * r * f1**3 + (r * f3 + 2 * f2) * f**2
                             + ((n - 4) * r * f2 + (n - 3) * f1) * f1 * f)


def _poly_F_parts(n, coeffs):
    full = np.zeros(2 * len(coeffs))
    full[1::2] = coeffs
    f = full
    f1 = P.polyder(f)
    f2 = P.polyder(f1)
    f3 = P.polyder(f2)
    x = np.array([0.0, 1.0])
    br = P.polyadd(P.polymul(P.polymul(P.polymul((3 - n) * x, f1), f1), f1),
                   P.polymul(P.polyadd(P.polymul(x, f3), 2 * f2), P.polymul(f, f)))
    br = P.polyadd(br, P.polymul(P.polymul(P.polyadd((n - 4) * P.polymul(x, f2), (n - 3) * f1), f1), f))
    br = np.pad(br, (0, 4))
    # r^0..r^2 coefficients vanish identically (r^1 exactly in floating point)
    return br[3:], f[1:]


def curvature_profile_F(geom: Geometry, r):
    """F(r) = Delta(r Delta r) for the radial geometry, stable down to r -> 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= geom.rho):
        raise GeometryError("curvature_profile_F needs 0 < r < rho")
    n = geom.n
    w = geom.warp
    if w.kind == "model":
        K = w.K
        return _out(-K * (n - 1) ** 2 + (n - 1) * (n - 3) * np.asarray(g_profile(K, r)))
    if w.kind == "poly":
        top, fr = _poly_F_parts(n, w.coeffs)
        return _out((n - 1) * P.polyval(r, top) / P.polyval(r, fr) ** 3)
    rs = 1e-2 * min(1.0, geom.rho)

    def direct(x):
        return curvature_profile_direct(n, w.f(x), w.f1(x), w.f2(x), w.f3(x), x)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.asarray(direct(np.maximum(r, rs)), dtype=float)
    small = r < rs
    if np.any(small):
        # F is even and smooth: extrapolate quadratically in r^2 from [rs, 2 rs]
        a, b = direct(rs), direct(2 * rs)
        v = np.where(small, a + (b - a) * (r**2 - rs**2) / (3 * rs**2), v)
    return _out(v)


def warp_excess(geom: Geometry, r):
    """f(r) - r f'(r) without the leading-order cancellation."""
    r = np.asarray(r, dtype=float)
    w = geom.warp
    if w.kind == "model":
        return _out(np.asarray(sin_k_excess(w.K, r)))
    if w.kind == "poly":
        c = np.zeros(2 * len(w.coeffs))
        for k, ck in enumerate(w.coeffs):
            c[2 * k + 1] = -2 * k * ck
        return _out(P.polyval(r, c))
    return _out(np.asarray(w.f(r)) - r * np.asarray(w.f1(r)))


def angular_profile(geom: Geometry, r):
    """(1 - r f'/f)/f^2 = (f - r f')/f^3; for model spaces this equals G."""
    r = np.asarray(r, dtype=float)
    if geom.warp.kind == "model":
        return g_profile(geom.warp.K, r)
    f = np.asarray(geom.warp.f(r))
    return _out(np.asarray(warp_excess(geom, r)) / f**3)


# ---------------------------------------------------------------------------
# JSON

def geometry_from_dict(d: dict, rho_cap: float = RHO_CAP) -> Geometry:
    kind = d.get("type")
    try:
        n = d["n"]
        if kind == "model":
            return model_warp(d["K"], n, rho_cap=rho_cap)
        if kind == "custom":
            g = poly_warp(n, d["rho"], d["f_poly"])
            return g
    except KeyError as exc:
        raise GeometryError(f"geometry config missing field {exc}") from None
    raise GeometryError(f"unknown geometry type {kind!r}")


def geometry_from_json(text: str) -> Geometry:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GeometryError(f"invalid geometry JSON: {exc}") from None
    if not isinstance(d, dict):
        raise GeometryError("geometry JSON must be an object")
    return geometry_from_dict(d)
