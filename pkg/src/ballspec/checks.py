"""Verification matrices run by ``ballspec check``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .bessel import bessel_order, bessel_zeros
from .bounds import check_bounds
from .geometry import model_warp
from .identities import eigenvalue_via_integral, hadamard_residual, spectrum_assemble
from .radial import RadialProblem, solve_eigenvalue, solve_value

DEFAULT_K = (-2.0, -1.0, 1.0, 2.0)
DEFAULT_N = (2, 3, 4)
DEFAULT_M = (0, 1, 2)
DEFAULT_L = (1, 2)
DEFAULT_R = (0.3, 1.0, 2.0)
INTEGRAL_CASES = ((-1.0, 3, 0), (1.0, 2, 0), (1.0, 2, 1), (-1.0, 2, 1))

HADAMARD_LIMIT = 1e-5
INTEGRAL_LIMIT = 1e-3
SPECTRUM_LIMIT = 1e-6


@dataclass
class CaseResult:
    label: str
    passed: bool
    value: float  # margin (bounds) or defect (others)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.label} {self.value:.6e}"


def bounds_matrix(Ks=DEFAULT_K, ns=DEFAULT_N, ms=DEFAULT_M, ls=DEFAULT_L, radii=DEFAULT_R):
    for K, n, m, l, r in itertools.product(Ks, ns, ms, ls, radii):
        if K > 0 and r >= math.pi / math.sqrt(K):
            continue
        yield K, n, m, l, r


def run_bounds(tol=1e-10, **matrix):
    out = []
    for K, n, m, l, r in bounds_matrix(**matrix):
        pair = solve_eigenvalue(RadialProblem(model_warp(K, n), m, r), l, tol)
        rep = check_bounds(pair, K, n, m, l, r, solver_tol=tol)
        label = f"K={K:g} n={n} m={m} l={l} r0={r:g} lam={rep.lam:.12g}"
        out.append(CaseResult(label, rep.passed, min(rep.margin_low, rep.margin_high)))
    return out


def run_hadamard(h=1e-4, **matrix):
    matrix.setdefault("ls", (1,))
    out = []
    for K, n, m, l, r in bounds_matrix(**matrix):
        res = hadamard_residual(model_warp(K, n), m, l, r, h)
        out.append(CaseResult(f"K={K:g} n={n} m={m} l={l} t={r:g}", res <= HADAMARD_LIMIT, res))
    return out


def run_integral(cases=INTEGRAL_CASES, t_nodes=256, r1=1.0):
    out = []
    for K, n, m in cases:
        g = model_warp(K, n)
        ref = solve_value(RadialProblem(g, m, r1), 1, 1e-12)
        val = eigenvalue_via_integral(g, m, 1, r1, t_nodes)
        d = abs(val - ref) / ref
        out.append(CaseResult(f"K={K:g} n={n} m={m} l=1 r1={r1:g}", d <= INTEGRAL_LIMIT, d))
    return out


def run_spectrum(count=6):
    entries = spectrum_assemble(model_warp(0.0, 2), 1.0, count)
    got = sorted(v for e in entries for v in [e.lam] * e.multiplicity)[:count]
    ref = sorted(float(j) ** 2 for m in range(4)
                 for j in bessel_zeros(bessel_order(2, m), 3)
                 for _ in range(1 if m == 0 else 2))[:count]
    out = []
    for i, (a, b) in enumerate(zip(got, ref)):
        d = abs(a - b) / b
        out.append(CaseResult(f"disc #{i + 1} lam={a:.10g}", d <= SPECTRUM_LIMIT, d))
    return out


SUITES = {
    "bounds": run_bounds,
    "hadamard": run_hadamard,
    "integral": run_integral,
    "spectrum": run_spectrum,
}
