"""Two-sided curvature bounds for Dirichlet eigenvalues of model-space balls.

For constant curvature K, dimension n and indices (m, l), with
j = j^l_{m+n/2-1} and h(r) = 1/sin_K(r)^2 - 1/r^2:

    m > 0 or n > 2:
        (j/r0)^2 + K (2m^2 + 2m(n-2) - n(n-1))/6
            <= lam <= (j/r0)^2 - K ((n-1)/2)^2 + ((m + (n-2)/2)^2 - 1/4) h(r0)
    m = 0, n = 2:
        (j/r0)^2 - (K + h(r0))/4 <= lam <= (j/r0)^2 - K/3
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bessel import bessel_order, bessel_zero
from .geometry import h_profile


class BoundsError(ValueError):
    pass


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class BoundReport:
    lam: float
    lower: float
    upper: float
    margin_low: float
    margin_high: float
    eps: float
    passed: bool

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.lower:.12g} <= {self.lam:.12g} <= {self.upper:.12g} "
                f"(margins {self.margin_low:.3e}, {self.margin_high:.3e})")


def _check_domain(K, r0):
    if not r0 > 0:
        raise BoundsError("r0 must be positive")
    if K > 0 and not r0 < math.pi / math.sqrt(K):
        raise BoundsError(f"r0={r0!r} must be below pi/sqrt(K)={math.pi / math.sqrt(K)!r}")


def theorem_bounds(K: float, n: int, m: int, l: int, r0: float):
    """(lower, upper) envelope for lam_{m,l}(r0) on the model space of curvature K."""
    _check_domain(K, r0)
    if n < 2 or m < 0 or l < 1:
        raise BoundsError(f"invalid indices n={n}, m={m}, l={l}")
    j = bessel_zero(bessel_order(n, m), l).value
    base = (j / r0) ** 2
    h = h_profile(K, r0)
    if m == 0 and n == 2:
        return base - 0.25 * (K + h), base - K / 3.0
    lower = base + K * (2 * m * m + 2 * m * (n - 2) - n * (n - 1)) / 6.0
    upper = base - K * ((n - 1) / 2.0) ** 2 + ((m + (n - 2) / 2.0) ** 2 - 0.25) * h
    return lower, upper


def check_bounds(pair, K: float, n: int, m: int, l: int, r0: float,
                 solver_tol: float = 1e-10, strict: bool = False) -> BoundReport:
    """Compare a computed eigenpair against the envelope.

    With ``strict`` a violation raises BoundViolation instead of returning a
    failed report.
    """
    if getattr(pair, "l", l) != l:
        raise BoundsError(f"eigenpair has l={pair.l}, expected {l}")
    lam = float(getattr(pair, "lam", pair))
    lower, upper = theorem_bounds(K, n, m, l, r0)
    eps = max(1e-8, 10 * solver_tol) * abs(lam)
    ml, mh = lam - lower, upper - lam
    passed = ml >= -eps and mh >= -eps
    rep = BoundReport(lam, lower, upper, ml, mh, eps, passed)
    if strict and not passed:
        raise BoundViolation(str(rep))
    return rep


def hyperbolic_limit(K: float, n: int) -> float:
    """Large-radius limit -((n-1)/2)^2 K of every lam_{m,l} when K < 0."""
    if not K < 0:
        raise BoundsError("hyperbolic limit needs K < 0")
    return -((n - 1) / 2.0) ** 2 * K


def baginski_interval(r0: float):
    """First-eigenvalue interval for a spherical cap of radius r0 in S^2."""
    if not 0 < r0 < math.pi:
        raise BoundsError("r0 must lie in (0, pi)")
    j = bessel_zero(0.0, 1).value
    base = (j / r0) ** 2
    lo = base - 0.25 * (1.0 + h_profile(1.0, r0))
    hi = base - 1.0 / 3.0
    return lo, hi
