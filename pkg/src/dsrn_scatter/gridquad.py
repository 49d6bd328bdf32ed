"""Uniform-grid cumulative integration of 8th order.

Each interval integral uses the degree-7 interpolating polynomial through an
8-point stencil (centered in the interior, one-sided near the ends); the
weights are computed once, exactly, over the rationals, so the only error is
the interpolation error O(h^8 f^(8)).  This is the backbone for the phase /
Liouville integrals and for the Volterra iteration, where a cumulative
integral of a smooth array is needed at every grid point.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.interpolate import PPoly
from scipy.linalg import solveh_banded

__all__ = ["cumulative_integral", "window_weights", "uniform_cubic_spline"]

_NPTS = 8  # stencil size; interpolation degree 7, order h^8


def _solve_fraction(A, b):
    """Gaussian elimination over Fraction entries (exact)."""
    n = len(b)
    A = [row[:] for row in A]
    b = b[:]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = Fraction(1, 1) / A[col][col]
        A[col] = [v * inv for v in A[col]]
        b[col] *= inv
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [vr - f * vc for vr, vc in zip(A[r], A[col])]
                b[r] -= f * b[col]
    return b


def window_weights() -> np.ndarray:
    """(7, 8) weights: row s integrates the degree-7 interpolant on nodes
    0..7 over the interval [s, s+1] (unit spacing)."""
    rows = []
    for s in range(_NPTS - 1):
        # sum_j w_j j^k = ((s+1)^{k+1} - s^{k+1})/(k+1) for k = 0..7
        A = [[Fraction(j) ** k for j in range(_NPTS)] for k in range(_NPTS)]
        b = [
            (Fraction(s + 1) ** (k + 1) - Fraction(s) ** (k + 1))
            / Fraction(k + 1)
            for k in range(_NPTS)
        ]
        rows.append([float(w) for w in _solve_fraction(A, b)])
    return np.array(rows)


_W = window_weights()
_HALF = (_NPTS - 2) // 2  # interior windows start at i - 3


def cumulative_integral(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral of samples f on a uniform grid of spacing h.

    Returns an array of the same leading length with out[0] = 0 and
    out[i] = integral from x_0 to x_i.  Works on complex or real samples of
    shape (N, ...); N must be at least 8.
    """
    f = np.asarray(f)
    n = f.shape[0]
    if n < _NPTS:
        raise ValueError(f"need at least {_NPTS} samples, got {n}")
    inc = np.zeros_like(f)

    # Interior intervals [x_i, x_{i+1}], i = 3 .. n-5: window starts at i-3.
    w = _W[_HALF]
    core = np.zeros_like(f[: n - _NPTS + 1])
    for j in range(_NPTS):
        core = core + w[j] * f[j : n - _NPTS + 1 + j]
    inc[1 + _HALF : n - _NPTS + 2 + _HALF] = core

    # Leading intervals use the first 8 samples, trailing the last 8.
    for i in range(_HALF):
        inc[i + 1] = np.tensordot(_W[i], f[:_NPTS], axes=(0, 0))
    for i in range(n - _NPTS + 1 + _HALF, n - 1):
        s = i - (n - _NPTS)
        inc[i + 1] = np.tensordot(_W[s], f[n - _NPTS :], axes=(0, 0))

    return h * np.cumsum(inc, axis=0)


def uniform_cubic_spline(x: np.ndarray, y: np.ndarray) -> PPoly:
    """Natural cubic spline on a uniform grid, as a scipy PPoly.

    Much cheaper to construct than scipy's CubicSpline for large grids
    (one symmetric tridiagonal solve); the natural-boundary O(h^2) defect
    is confined to the end intervals, which for the potential tables lie
    in the exponentially small tails.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    h = x[1] - x[0]
    delta = (y[1:] - y[:-1]) / h

    # symmetric tridiagonal system for the knot slopes d_i
    ab = np.empty((2, n))
    ab[0, :] = 1.0          # superdiagonal (and by symmetry subdiagonal)
    ab[1, :] = 4.0
    ab[1, 0] = ab[1, -1] = 2.0
    rhs = np.empty(n)
    rhs[1:-1] = 3.0 * (delta[:-1] + delta[1:])
    rhs[0] = 3.0 * delta[0]
    rhs[-1] = 3.0 * delta[-1]
    d = solveh_banded(ab, rhs, lower=False)

    c = np.empty((4, n - 1))
    c[3] = y[:-1]
    c[2] = d[:-1]
    c[1] = (3.0 * delta - 2.0 * d[:-1] - d[1:]) / h
    c[0] = (d[:-1] + d[1:] - 2.0 * delta) / (h * h)
    return PPoly(c, x, extrapolate=True)
