"""Checks built on the radial solver: domain derivative, integral
reconstruction of eigenvalues, and the full ball spectrum with multiplicities."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .bessel import bessel_order, bessel_zero
from .geometry import Geometry, angular_profile, curvature_profile_F, _poly_F_parts
from .radial import RadialProblem, eigenfunction, solve_eigenvalue, solve_value

HADAMARD_TOL = 1e-12


class CutoffError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectrumEntry:
    lam: float
    m: int
    l: int
    multiplicity: int


def multiplicity(n: int, m: int) -> int:
    """Dimension of degree-m spherical harmonics on S^{n-1}."""
    if n < 2 or m < 0:
        raise ValueError(f"invalid n={n}, m={m}")
    if m == 0:
        return 1
    return (2 * m + n - 2) * math.factorial(m + n - 3) // (math.factorial(m) * math.factorial(n - 2))


def hadamard_residual(geom: Geometry, m: int, l: int, t: float, h: float = 1e-4,
                      tol: float = HADAMARD_TOL) -> float:
    """Relative defect of d lam/dt = -f(t)^{n-1} R'(t)^2 using a central difference."""
    if not (0 < t - h and t + h < geom.rho):
        raise ValueError("[t-h, t+h] must lie inside (0, rho)")
    pair = solve_eigenvalue(RadialProblem(geom, m, t), l, tol)
    lp = solve_value(RadialProblem(geom, m, t + h), l, tol, guess=pair.lam)
    lm = solve_value(RadialProblem(geom, m, t - h), l, tol, guess=pair.lam)
    dlam = (lp - lm) / (2 * h)
    rhs = -float(geom.warp.f(t)) ** (geom.n - 1) * pair.slope_at_t**2
    return abs(dlam - rhs) / abs(dlam)


def _integrand_weight(geom, m, r):
    """F(r) + 4 m(m+n-2) (1 - r f'/f)/f^2, evaluated for r > 0."""
    mu = m * (m + geom.n - 2)
    return np.asarray(curvature_profile_F(geom, r)) + 4 * mu * np.asarray(angular_profile(geom, r))


def _weight_at_origin(geom, m):
    mu = m * (m + geom.n - 2)
    w = geom.warp
    c3 = w.third_taylor
    if w.kind == "model":
        F0 = -w.K * (geom.n - 1) ** 2 + (geom.n - 1) * (geom.n - 3) * w.K / 3
    elif w.kind == "poly":
        top, _ = _poly_F_parts(geom.n, w.coeffs)
        F0 = (geom.n - 1) * top[0]
    else:
        F0 = float(curvature_profile_F(geom, 1e-3 * min(1.0, geom.rho)))
    # (f - r f')/f^3 -> -2 c3
    return F0 - 8 * mu * c3


def inner_integral(geom: Geometry, m: int, l: int, t: float, guess=None, tol=1e-10):
    """(lam(t), int_0^t R_t^2 [F + 4mu (1 - r f'/f)/f^2] f^{n-1} dr)."""
    prob = RadialProblem(geom, m, t)
    lam = solve_value(prob, l, tol, guess)
    grid, R, _, weight, _ = eigenfunction(prob, lam)
    vals = np.zeros_like(grid)
    vals[1:] = R[1:] ** 2 * _integrand_weight(geom, m, grid[1:]) * weight[1:]
    return lam, float(integrate.simpson(vals, x=grid))


def outer_rule(r1: float, t_nodes: int, order: int = 8):
    """Composite Gauss-Legendre nodes/weights on (0, r1], panels graded toward 0.

    Returns (nodes, weights, first_break); the first panel [0, first_break]
    is excluded and handled by the small-radius asymptotic.
    """
    if t_nodes < 64 or t_nodes % order:
        raise ValueError(f"t_nodes must be >= 64 and a multiple of {order}")
    panels = t_nodes // order
    # one extra panel: the innermost one is replaced by the asymptotic
    brk = r1 * (np.arange(panels + 2) / (panels + 1)) ** 2
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(brk[1:-1], brk[2:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights), brk[1]


def eigenvalue_via_integral(geom: Geometry, m: int, l: int, r1: float,
                            t_nodes: int = 256, workers: int = 1, tol: float = 1e-10,
                            order: int = 8) -> float:
    """lam_{m,l}(r1) = j^2/r1^2 + (1/(2 r1^2)) int_0^{r1} t I(t) dt.

    ``order`` is the Gauss-Legendre panel order of the outer rule.
    """
    if not 0 < r1 < geom.rho:
        raise ValueError("r1 must lie in (0, rho)")
    nodes, weights, t0 = outer_rule(r1, t_nodes, order)
    j = bessel_zero(bessel_order(geom.n, m), l).value

    def chunk(ts):
        out, guess = [], None
        for t in ts:
            lam, val = inner_integral(geom, m, l, t, guess, tol)
            guess = lam
            out.append(val)
        return out

    if workers > 1:
        parts = np.array_split(nodes, workers)
        with ThreadPoolExecutor(workers) as ex:
            inner = np.concatenate([np.asarray(v) for v in ex.map(chunk, parts)])
    else:
        inner = np.asarray(chunk(nodes))
    if not np.all(np.isfinite(inner)):
        raise ArithmeticError(f"inner integral not finite at {t_nodes} nodes")
    # t I(t) ~ I(0) t on the innermost panel
    head = _weight_at_origin(geom, m) * t0**2 / 2
    total = head + float(np.dot(weights, nodes * inner))
    return j**2 / r1**2 + total / (2 * r1**2)


def spectrum_assemble(geom: Geometry, t: float, count: int, tol: float = 1e-10,
                      max_m: int = 50) -> list[SpectrumEntry]:
    """Lowest eigenvalues of the ball B_t with multiplicities (total >= count)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    entries: list[SpectrumEntry] = []

    def threshold():
        total = 0
        for e in sorted(entries, key=lambda e: e.lam):
            total += e.multiplicity
            if total >= count:
                return e.lam
        return math.inf

    prev_first = -math.inf
    for m in range(max_m + 1):
        prob = RadialProblem(geom, m, t)
        mult = multiplicity(geom.n, m)
        lam = solve_value(prob, 1, tol)
        if lam <= prev_first:
            raise CutoffError(f"lam_(m,1) not increasing in m at m={m}")
        prev_first = lam
        if lam > threshold():
            break
        l = 1
        while lam <= threshold():
            entries.append(SpectrumEntry(lam, m, l, mult))
            l += 1
            lam = solve_value(prob, l, tol, guess=lam * (1 + 1.0 / l))
    else:
        raise CutoffError(f"angular cutoff not reached by m={max_m}")
    out, total = [], 0
    for e in sorted(entries, key=lambda e: (e.lam, e.m, e.l)):
        if total >= count:
            break
        out.append(e)
        total += e.multiplicity
    return out
