"""Radial Dirichlet problem on a geodesic ball of radius t.

    (f^{n-1} R')' + (lam f^{n-1} - m(m+n-2) f^{n-3}) R = 0,
    R bounded at 0,  R(t) = 0.

Eigenvalues are found by shooting a modified Pruefer phase from a Frobenius
start near the origin; the phase at r = t counts interior zeros, so the l-th
eigenvalue is where it equals l*pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, linalg, optimize

from . import _kernels as kern
from .bessel import bessel_order, bessel_zero
from .geometry import Geometry

RTOL = 1e-11
ATOL = 1e-13
EPS_FACTOR = 1e-6
QUAD_NODES = 4097
MAX_STEPS = 200_000
MAX_REFINE = 80
EDGE_MARGIN = 1e-9


class SolverError(RuntimeError):
    pass


class BracketError(SolverError):
    pass


class ConvergenceError(SolverError):
    pass


@dataclass(frozen=True)
class RadialProblem:
    geom: Geometry
    m: int
    t: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"angular index must be an integer >= 0, got {self.m}")
        if not 0 < self.t <= (1 - EDGE_MARGIN) * self.geom.rho:
            raise ValueError(f"radius {self.t!r} outside (0, rho={self.geom.rho!r})")

    @property
    def n(self) -> int:
        return self.geom.n

    @property
    def mu(self) -> float:
        """Angular eigenvalue m(m+n-2)."""
        return float(self.m * (self.m + self.n - 2))

    @property
    def r_eps(self) -> float:
        return EPS_FACTOR * self.t


@dataclass(frozen=True)
class RadialEigenpair:
    lam: float
    l: int
    grid: np.ndarray
    R: np.ndarray
    R1: np.ndarray
    slope_at_t: float
    weight: np.ndarray

    @property
    def sign_changes(self) -> int:
        s = np.sign(self.R[1:-1])
        s = s[s != 0]
        return int(np.count_nonzero(s[1:] != s[:-1]))

    def norm_defect(self) -> float:
        return abs(integrate.simpson(self.weight * self.R**2, x=self.grid) - 1.0)


# ---------------------------------------------------------------------------
# singular start

def frobenius_coefficient(prob: RadialProblem, lam: float) -> float:
    """c2 in R = r^m (1 + c2 r^2 + ...), for f = r + c3 r^3 + ..."""
    n, m = prob.n, prob.m
    c3 = prob.geom.warp.third_taylor
    return -(lam + 2 * c3 * m * (m + 2 * n - 3)) / (2 * (2 * m + n))


def frobenius_start(prob: RadialProblem, lam: float, r_eps: Optional[float] = None):
    """(R, R') at r_eps for the regular solution normalised as R ~ r^m."""
    r = prob.r_eps if r_eps is None else r_eps
    m = prob.m
    c2 = frobenius_coefficient(prob, lam)
    R0 = r**m * (1 + c2 * r * r)
    R1 = (m * r ** (m - 1) if m > 0 else 0.0) + (m + 2) * c2 * r ** (m + 1)
    return R0, R1


def _start_state(prob, lam, r):
    # theta = atan2(sqrt(lam) R, R'), log rho = log(f^{n-1} sqrt(lam R^2 + R'^2));
    # both computed after dividing out r^{m-1} to avoid underflow at large m
    m = prob.m
    c2 = frobenius_coefficient(prob, lam)
    a = r * (1 + c2 * r * r)
    b = m + (m + 2) * c2 * r * r
    sl = math.sqrt(lam)
    theta = math.atan2(sl * a, b)
    f = float(prob.geom.warp.f(r))
    logrho = (prob.n - 1) * math.log(f) + (m - 1) * math.log(r) + 0.5 * math.log(lam * a * a + b * b)
    return np.array([theta, logrho])


def _python_rhs(geom):
    w = geom.warp

    def rhs(r, y, par):
        sl, mu, n = par[1], par[2], par[3]
        f = float(w.f(r))
        f1 = float(w.f1(r))
        st, ct = math.sin(y[0]), math.cos(y[0])
        a = mu / (sl * f * f)
        b = (n - 1) * f1 / f
        return np.array([sl - a * st * st + b * st * ct, b * st * st + a * st * ct])
    return rhs


def _shoot(prob: RadialProblem, lam: float, t: Optional[float] = None, dense=False):
    if not lam > 0 or not math.isfinite(lam):
        raise ValueError(f"shooting needs a finite positive lambda, got {lam}")
    t = prob.t if t is None else t
    r0 = prob.r_eps
    y0 = _start_state(prob, lam, r0)
    wp = prob.geom.warp.kernel_params()
    head = [lam, math.sqrt(lam), prob.mu, float(prob.n)]
    if wp is not None:
        par = np.concatenate([head, wp])
        out = kern.dopri5(kern.phase_rhs, par, r0, t, y0, RTOL, ATOL, 0.01 * r0, dense, MAX_STEPS)
    else:
        par = np.array(head)
        out = kern.dopri5.py_func(_python_rhs(prob.geom), par, r0, t, y0, RTOL, ATOL,
                                  0.01 * r0, dense, MAX_STEPS)
    y, nsteps, ts, ys, qs, ok = out
    if not ok:
        last = ts[nsteps] if dense else float("nan")
        raise SolverError(f"phase integration failed after {nsteps} steps (lam={lam!r}, last r={last!r})")
    return y, (ts, ys, qs)


def phase_at(prob: RadialProblem, lam: float) -> float:
    """Pruefer phase theta(t; lam)."""
    return float(_shoot(prob, lam)[0][0])


def pruefer_count(prob: RadialProblem, lam: float):
    """(number of interior zeros of the regular solution, terminal phase)."""
    theta = phase_at(prob, lam)
    # phase crosses multiples of pi only upwards
    zeros = max(0, math.ceil(theta / math.pi) - 1)
    return zeros, theta


# ---------------------------------------------------------------------------
# eigenvalues

def _initial_guess(prob: RadialProblem, l: int) -> float:
    j = bessel_zero(bessel_order(prob.n, prob.m), l).value
    g = (j / prob.t) ** 2
    if prob.geom.is_model:
        from .bounds import theorem_bounds
        try:
            lo, hi = theorem_bounds(prob.geom.curvature, prob.n, prob.m, l, prob.t)
            g = 0.5 * (lo + hi)
        except ValueError:
            pass
    return g if g > 0 else (j / prob.t) ** 2


def bracket_eigenvalue(prob: RadialProblem, l: int, guess: Optional[float] = None,
                       spread: float = 0.05):
    """(lo, hi, phase_lo, phase_hi) with theta(lo) < l*pi < theta(hi)."""
    target = l * math.pi
    g = guess if guess is not None else _initial_guess(prob, l)
    lo, hi = g * (1 - spread), g * (1 + spread)
    plo = phase_at(prob, lo)
    for _ in range(200):
        if plo < target:
            break
        hi, lo = lo, lo * 0.5
        plo = phase_at(prob, lo)
    else:
        raise BracketError(f"no lower bracket for l={l}")
    phi = phase_at(prob, hi)
    for _ in range(200):
        if phi > target:
            break
        lo, plo = hi, phi
        hi *= 2.0
        phi = phase_at(prob, hi)
    else:
        raise BracketError(f"no upper bracket for l={l}")
    return lo, hi, plo, phi


def _refine(prob, l, lo, hi, tol):
    target = l * math.pi

    def resid(lam):
        return phase_at(prob, lam) - target
    try:
        lam, info = optimize.brentq(resid, lo, hi, xtol=1e-300, rtol=max(tol, 4.5e-16),
                                    maxiter=MAX_REFINE, full_output=True, disp=False)
    except ValueError as exc:
        raise BracketError(str(exc)) from None
    if not info.converged:
        raise ConvergenceError(f"eigenvalue refinement stalled in [{lo!r}, {hi!r}] "
                               f"(width {hi - lo:.3e})")
    return lam


def eigenfunction(prob: RadialProblem, lam: float, nodes: int = QUAD_NODES):
    """Normalised (grid, R, R', weight, slope_at_t) for an eigenvalue lam."""
    _, (ts, ys, qs) = _shoot(prob, lam, dense=True)
    grid = np.linspace(0.0, prob.t, nodes)
    inner = grid[1:]
    st = kern.dense_eval(ts, ys, qs, np.clip(inner, ts[0], ts[-1]))
    theta, logrho = st[:, 0], st[:, 1]
    f = np.asarray(prob.geom.warp.f(inner), dtype=float)
    logf = np.log(f)
    n = prob.n
    base = logrho - (n - 1) * logf
    R = np.empty(nodes)
    R1 = np.empty(nodes)
    R[1:] = np.exp(base) * np.sin(theta) / math.sqrt(lam)
    R1[1:] = np.exp(base) * np.cos(theta)
    m = prob.m
    R[0] = 1.0 if m == 0 else 0.0
    R1[0] = 1.0 if m == 1 else 0.0
    weight = np.empty(nodes)
    weight[0] = 0.0
    weight[1:] = f ** (n - 1)
    dens = np.empty(nodes)
    dens[0] = 0.0
    dens[1:] = np.exp(2 * logrho - (n - 1) * logf) * np.sin(theta) ** 2 / lam
    # segment [0, r_eps] is O(r_eps^{n+2m}) and dropped by the Simpson rule
    norm = integrate.simpson(dens, x=grid)
    c = 1.0 / math.sqrt(norm)
    R *= c
    R1 *= c
    R[-1] = 0.0 if abs(R[-1]) < 1e-9 * np.max(np.abs(R)) else R[-1]
    slope = float(R1[-1])
    return grid, R, R1, weight, slope


def solve_eigenvalue(prob: RadialProblem, l: int, tol: float = 1e-10,
                     guess: Optional[float] = None) -> RadialEigenpair:
    """l-th Dirichlet eigenvalue of the radial problem and its normalised eigenfunction."""
    if l < 1:
        raise ValueError("radial index l must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi, _, _ = bracket_eigenvalue(prob, l, guess)
    lam = _refine(prob, l, lo, hi, tol)
    grid, R, R1, weight, slope = eigenfunction(prob, lam)
    return RadialEigenpair(lam, l, grid, R, R1, slope, weight)


def solve_value(prob: RadialProblem, l: int, tol: float = 1e-10,
                guess: Optional[float] = None) -> float:
    """Eigenvalue only (skips the eigenfunction pass)."""
    lo, hi, _, _ = bracket_eigenvalue(prob, l, guess)
    return _refine(prob, l, lo, hi, tol)


def family_solve(geom: Geometry, m: int, l: int, radii: Sequence[float],
                 tol: float = 1e-10, values_only: bool = False) -> list:
    """Eigenpairs along increasing radii, each warm-started from the previous one."""
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    out = []
    guess = None
    prev_r = prev_lam = None
    for r in radii:
        prob = RadialProblem(geom, m, r)
        if prev_r is not None:
            # r^2 lam(r) varies slowly
            guess = prev_lam * (prev_r / r) ** 2
        if values_only:
            lam = solve_value(prob, l, tol, guess)
            out.append(lam)
        else:
            pair = solve_eigenvalue(prob, l, tol, guess)
            lam = pair.lam
            out.append(pair)
        prev_r, prev_lam = r, lam
    return out


# ---------------------------------------------------------------------------
# independent finite-difference oracle

def fd_matrix(prob: RadialProblem, grid_size: int):
    """Symmetric tridiagonal (diag, offdiag) for the weighted radial operator.

    Cell-centred nodes r_i = (i - 1/2) h, i = 1..N, with the Dirichlet node
    (N + 1/2) h = t; the flux f^{n-1} vanishes at r = 0.
    """
    if grid_size < 100:
        raise ValueError("grid too coarse: grid_size must be >= 100")
    N = int(grid_size)
    h = prob.t / (N + 0.5)
    w = prob.geom.warp
    n = prob.n
    nodes = (np.arange(1, N + 1) - 0.5) * h
    faces = np.arange(0, N + 1) * h
    p = np.asarray(w.f(faces), dtype=float) ** (n - 1)
    p[0] = 0.0
    fn = np.asarray(w.f(nodes), dtype=float)
    wgt = fn ** (n - 1)
    q = prob.mu * fn ** (n - 3)
    diag = (p[:-1] + p[1:]) / h**2 + q
    off = -p[1:-1] / h**2
    s = np.sqrt(wgt)
    return diag / wgt, off / (s[:-1] * s[1:])


def oracle_matrix_solve(prob: RadialProblem, grid_size: int, count: int = 3) -> np.ndarray:
    """Lowest `count` eigenvalues of the finite-difference operator (LAPACK bisection)."""
    d, e = fd_matrix(prob, grid_size)
    return linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i",
                                   select_range=(0, count - 1), lapack_driver="stebz")


def oracle_count_below(prob: RadialProblem, grid_size: int, threshold: float) -> int:
    """Number of finite-difference eigenvalues below threshold (Sturm count)."""
    d, e = fd_matrix(prob, grid_size)
    vals = linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="v",
                                   select_range=(-np.inf, threshold), lapack_driver="stebz")
    return len(vals)


def oracle_extrapolated(prob: RadialProblem, grid_size: int, count: int = 3) -> np.ndarray:
    """Richardson extrapolation of the O(h^2) oracle from grid_size/2 and grid_size."""
    half = grid_size // 2
    coarse = oracle_matrix_solve(prob, half, count)
    fine = oracle_matrix_solve(prob, grid_size, count)
    k = ((grid_size + 0.5) / (half + 0.5)) ** 2
    return (k * fine - coarse) / (k - 1)
