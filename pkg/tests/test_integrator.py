import math

import numpy as np
import pytest
from numba import njit

from ballspec import _kernels as kern


@njit
def oscillator(t, y, par):
    out = np.empty(2)
    out[0] = y[1]
    out[1] = -par[0] * y[0]
    return out


def test_dopri5_harmonic_oscillator():
    w2 = 9.0
    y0 = np.array([1.0, 0.0])
    y, nsteps, ts, ys, qs, ok = kern.dopri5(oscillator, np.array([w2]), 0.0, 4.0, y0,
                                            1e-12, 1e-14, 1e-3, True, 100000)
    assert ok and nsteps > 10
    assert abs(y[0] - math.cos(12.0)) < 1e-10
    x = np.linspace(0.0, 4.0, 777)
    dense = kern.dense_eval(ts, ys, qs, x)
    np.testing.assert_allclose(dense[:, 0], np.cos(3 * x), atol=1e-9)
    np.testing.assert_allclose(dense[:, 1], -3 * np.sin(3 * x), atol=3e-9)


def test_dopri5_error_scales_with_tolerance():
    errs = []
    for tol in (1e-6, 1e-9):
        y, *_ = kern.dopri5(oscillator, np.array([1.0]), 0.0, 10.0, np.array([1.0, 0.0]),
                            tol, tol * 1e-2, 1e-3, False, 100000)
        errs.append(abs(y[0] - math.cos(10.0)))
    assert errs[1] < errs[0] / 100


def test_dopri5_step_budget_reported():
    out = kern.dopri5(oscillator, np.array([1e6]), 0.0, 10.0, np.array([1.0, 0.0]),
                      1e-12, 1e-14, 1e-3, False, 50)
    assert out[-1] is False


def test_python_fallback_matches_compiled():
    args = (np.array([4.0]), 0.0, 2.0, np.array([1.0, 0.0]), 1e-11, 1e-13, 1e-3, False, 100000)
    a = kern.dopri5(oscillator, *args)[0]
    b = kern.dopri5.py_func(oscillator.py_func, *args)[0]
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_scalar_warp_kernels_match_numpy():
    from ballspec.geometry import cos_k, sin_k
    for K in (-3.0, -1e-6, 0.0, 1e-6, 2.0):
        for r in (1e-7, 0.3, 1.1):
            assert kern.sin_k_scalar(K, r) == pytest.approx(sin_k(K, r), rel=4e-16)
            assert kern.cos_k_scalar(K, r) == pytest.approx(cos_k(K, r), rel=4e-16)
