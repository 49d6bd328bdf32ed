"""Adaptive Fehlberg 7(8) integration of the scaled Faddeev system.

The hatted Faddeev matrix M(x) = F(x) e^{-i G1 lam x} of the reduced Dirac
system satisfies, in 2x2 blocks,

    M11' = -i k M21            M12' = 2 i lam M12 - i k M22
    M21' = -2 i lam M21 + i kd M11    M22' = i kd M12

with k(x, z) = e^{2i C^-(x)} [[-i b, z a], [-z a, i b]] and kd its analytic
adjoint e^{-2i C^-(x)} [[i b, -z a], [z a, -i b]] (equal to k(x, zbar)^* so the
system is analytic in z and self-adjoint at real z).  M grows like
exp(|Re z| X(x) + int b), so the integrated unknown is the scaled matrix
N = M e^{-S} with S' = sign * (|Re z| a + b); N stays O(1) and plain
relative error control applies.

The integrator is an embedded 13-stage Fehlberg 7(8) pair with local
extrapolation, jitted with numba; a(x), b(x), C^-(x) come in as cubic
spline coefficient tables on a uniform grid.  Output is forced onto the
requested sample points by clamping steps.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["integrate_faddeev", "rk78_order_probe"]

# Fehlberg 7(8) tableau (13 stages).  Consistency (row sums = c, sum b = 1)
# is asserted at import; the pair's order is exercised by the test suite.
_C = np.array([
    0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5, 5.0 / 6.0,
    1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0,
])
_A = np.zeros((13, 13))
_A[1, 0] = 2.0 / 27.0
_A[2, :2] = [1.0 / 36.0, 1.0 / 12.0]
_A[3, :3] = [1.0 / 24.0, 0.0, 1.0 / 8.0]
_A[4, :4] = [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0]
_A[5, :5] = [1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0]
_A[6, :6] = [-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0]
_A[7, :7] = [31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0]
_A[8, :8] = [2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0]
_A[9, :9] = [-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0,
             -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0]
_A[10, :10] = [2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0,
               -301.0 / 82.0, 2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0]
_A[11, :11] = [3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0,
               -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0]
_A[12, :12] = [-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0,
               -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0,
               12.0 / 41.0, 0.0, 1.0]
# 8th-order propagation weights; the embedded error is
# (41/840) h (k0 + k10 - k11 - k12).
_B8 = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0,
                9.0 / 280.0, 9.0 / 280.0, 0.0, 41.0 / 840.0, 41.0 / 840.0])
_ERRW = 41.0 / 840.0

assert np.allclose(_A.sum(axis=1), _C, atol=1e-14)
assert abs(_B8.sum() - 1.0) < 1e-14


@njit(cache=True, nogil=True, inline="always")
def _spl(c, x0, h, x):
    n = c.shape[1]
    i = int((x - x0) / h)
    if i < 0:
        i = 0
    elif i > n - 1:
        i = n - 1
    t = x - (x0 + i * h)
    return ((c[0, i] * t + c[1, i]) * t + c[2, i]) * t + c[3, i]


@njit(cache=True, nogil=True)
def _rhs(x, Y, out, lam, z, srate, sgn, ca, cb, ccm, x0, h):
    a = _spl(ca, x0, h, x)
    b = _spl(cb, x0, h, x)
    cm = _spl(ccm, x0, h, x)
    ph = complex(np.cos(2.0 * cm), np.sin(2.0 * cm))
    phc = ph.conjugate()
    za = z * a
    k11 = ph * complex(0.0, -b)
    k12 = ph * za
    k21 = -ph * za
    k22 = ph * complex(0.0, b)
    d11 = phc * complex(0.0, b)
    d12 = -phc * za
    d21 = phc * za
    d22 = phc * complex(0.0, -b)
    sig = sgn * (srate * a + b)
    tl = 2.0j * lam
    for j in range(4):
        y0 = Y[0, j]
        y1 = Y[1, j]
        y2 = Y[2, j]
        y3 = Y[3, j]
        o0 = -1j * (k11 * y2 + k12 * y3) - sig * y0
        o1 = -1j * (k21 * y2 + k22 * y3) - sig * y1
        o2 = 1j * (d11 * y0 + d12 * y1) - sig * y2
        o3 = 1j * (d21 * y0 + d22 * y1) - sig * y3
        if j >= 2:
            o0 += tl * y0
            o1 += tl * y1
        else:
            o2 -= tl * y2
            o3 -= tl * y3
        out[0, j] = o0
        out[1, j] = o1
        out[2, j] = o2
        out[3, j] = o3


@njit(cache=True, nogil=True)
def integrate_faddeev(x_start, x_end, xout, lam, z, srate, sgn, rtol, hmax,
                      ca, cb, ccm, x0, hgrid, A, B8, C, Y0):
    """March the scaled system from x_start to x_end, emitting at xout.

    xout must be sorted in the direction of integration and contained in
    [x_start, x_end] (either order).  Returns (samples, n_steps, status):
    status 0 = ok, 1 = step-size underflow (stiffness failure).
    """
    nout = xout.shape[0]
    yout = np.empty((nout, 4, 4), dtype=np.complex128)
    direction = 1.0 if x_end >= x_start else -1.0

    Y = Y0.copy()
    K = np.empty((13, 4, 4), dtype=np.complex128)
    Ytmp = np.empty((4, 4), dtype=np.complex128)
    Ynew = np.empty((4, 4), dtype=np.complex128)

    x = x_start
    iout = 0
    while iout < nout and abs(xout[iout] - x) < 1e-13 * (1.0 + abs(x)):
        yout[iout] = Y
        iout += 1

    hstep = direction * min(hmax, abs(x_end - x_start))
    nsteps = 0
    min_h = 1e-12 * (1.0 + abs(x_end - x_start))

    while (x_end - x) * direction > 1e-13 * (1.0 + abs(x)):
        # clamp onto the next output point / endpoint
        next_stop = x_end
        if iout < nout and (xout[iout] - x_end) * direction < 0.0:
            next_stop = xout[iout]
        if (x + hstep - next_stop) * direction > 0.0:
            h_use = next_stop - x
        else:
            h_use = hstep
        if abs(h_use) < min_h:
            h_use = direction * min_h

        _rhs(x, Y, K[0], lam, z, srate, sgn, ca, cb, ccm, x0, hgrid)
        for s in range(1, 13):
            for r in range(4):
                for cidx in range(4):
                    acc = 0.0 + 0.0j
                    for j in range(s):
                        aij = A[s, j]
                        if aij != 0.0:
                            acc += aij * K[j][r, cidx]
                    Ytmp[r, cidx] = Y[r, cidx] + h_use * acc
            _rhs(x + C[s] * h_use, Ytmp, K[s], lam, z, srate, sgn,
                 ca, cb, ccm, x0, hgrid)

        scale = 1e-290  # relative control: the scaled solution may sit far below 1
        errmax = 0.0
        for r in range(4):
            for cidx in range(4):
                acc = 0.0 + 0.0j
                for s in range(13):
                    bs = B8[s]
                    if bs != 0.0:
                        acc += bs * K[s][r, cidx]
                ynew = Y[r, cidx] + h_use * acc
                Ynew[r, cidx] = ynew
                e = abs(K[0][r, cidx] + K[10][r, cidx]
                        - K[11][r, cidx] - K[12][r, cidx])
                if e > errmax:
                    errmax = e
                m = abs(ynew)
                if m > scale:
                    scale = m
                m = abs(Y[r, cidx])
                if m > scale:
                    scale = m
        err = abs(h_use) * _ERRW * errmax / (rtol * scale)

        if err <= 1.0:
            x = x + h_use
            for r in range(4):
                for cidx in range(4):
                    Y[r, cidx] = Ynew[r, cidx]
            while iout < nout and abs(xout[iout] - x) < 1e-12 * (1.0 + abs(x)):
                yout[iout] = Y
                iout += 1
            nsteps += 1

        # PI-free step update with the usual safety clamps
        if err > 1e-30:
            fac = 0.9 * err ** (-0.125)
            if fac > 4.0:
                fac = 4.0
            elif fac < 0.1:
                fac = 0.1
        else:
            fac = 4.0
        hstep = direction * min(hmax, abs(h_use) * fac)
        if abs(hstep) < min_h:
            return yout, nsteps, 1

    while iout < nout:
        yout[iout] = Y
        iout += 1
    return yout, nsteps, 0


def rk78_order_probe(omega: float, x1: float, rtol: float, hmax: float):
    """Integrate the free system with lam = omega/2 for the order/accuracy
    tests; entry (0, 2) of the result evolves as e^{i omega x}."""
    # constant splines: a = 0, b = 0, Cm = 0 -> only the lam commutator acts
    ca = np.zeros((4, 2))
    cb = np.zeros((4, 2))
    ccm = np.zeros((4, 2))
    xout = np.array([x1])
    Y0 = np.eye(4, dtype=np.complex128)
    Y0[0, 2] = 1.0
    yout, nsteps, status = integrate_faddeev(
        0.0, x1, xout, omega / 2.0, 0.0 + 0.0j, 0.0, 1.0, rtol, hmax,
        ca, cb, ccm, 0.0, 1.0, _A, _B8, _C, Y0,
    )
    if status != 0:
        raise RuntimeError("probe integration failed")
    return yout[0], nsteps


def tableau():
    return _A, _B8, _C
