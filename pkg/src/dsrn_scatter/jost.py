"""Jost/Faddeev matrix solutions of the reduced stationary Dirac system.

The conjugated (hatted) system is psi' = i G1 (lam - W(x, z)) psi with

    W = [[0, k], [kd, 0]],
    k(x, z)  = e^{2i C^-(x)} [[-i b, z a], [-z a, i b]],
    kd(x, z) = e^{-2i C^-(x)} [[i b, -z a], [z a, -i b]],

kd being the analytic continuation of k^* off the real z-axis (kd(x, z) =
k(x, zbar)^*), which keeps every Jost entry entire in z.  The right/left
Jost solutions are normalized by F_hat(x) e^{-i G1 lam x} -> I_4 as
x -> -inf / +inf; their Faddeev forms M = F_hat e^{-i G1 lam x} satisfy
Volterra integral equations solvable by an iterated series with factorial
convergence (|M| <= e^{int b} exp(|z| int a)).

Two independent solvers are provided: the production adaptive-ODE path
(scaled system, Fehlberg 7(8)) and the Volterra-series path on a uniform
grid (8th-order cumulative quadrature), which doubles as the complex-z
reference.  They share only the potential profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rk
from .gridquad import cumulative_integral
from .potentials import PotentialProfile

__all__ = [
    "GAMMA0",
    "GAMMA1",
    "GAMMA2",
    "GAMMA3",
    "DiracMatrices",
    "DIRAC",
    "ReducedPotential",
    "JostMatrix",
    "SolverError",
    "truncation_range",
    "faddeev_right_ode",
    "jost_left",
    "faddeev_right_volterra",
    "volterra_grid",
    "coupling_coeffs",
]

GAMMA1 = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)
GAMMA2 = np.array(
    [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
    dtype=np.complex128,
)
GAMMA0 = np.array(
    [[0, 0, -1j, 0], [0, 0, 0, 1j], [1j, 0, 0, 0], [0, -1j, 0, 0]],
    dtype=np.complex128,
)
# Completion of the triple to a full anticommuting set (G3 never enters the
# radial problem; it exists so the anticommutation invariant is testable).
GAMMA3 = np.array(
    [[0, 0, 0, 1j], [0, 0, 1j, 0], [0, -1j, 0, 0], [-1j, 0, 0, 0]],
    dtype=np.complex128,
)

Z_MAX = 64.0  # direct solves refuse beyond this unless forced


@dataclass(frozen=True)
class DiracMatrices:
    gamma0: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray


DIRAC = DiracMatrices(GAMMA0, GAMMA1, GAMMA2, GAMMA3)


class SolverError(RuntimeError):
    """Solver failure (stiffness, series divergence, unmet tail criterion)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class ReducedPotential:
    """The 2x2 off-diagonal block of the reduced potential at fixed z."""

    prof: PotentialProfile
    z: complex

    def k(self, x):
        a, b = self.prof.a(x), self.prof.b(x)
        ph = np.exp(2j * self.prof.phase_Cminus(x))
        za = self.z * a
        k = np.empty(np.shape(x) + (2, 2), dtype=np.complex128) \
            if np.ndim(x) else np.empty((2, 2), dtype=np.complex128)
        k[..., 0, 0] = -1j * b
        k[..., 0, 1] = za
        k[..., 1, 0] = -za
        k[..., 1, 1] = 1j * b
        return ph[..., None, None] * k if np.ndim(x) else ph * k

    def kdag(self, x):
        """Analytic continuation of k^*: equals k(x, conj(z))^* entrywise."""
        a, b = self.prof.a(x), self.prof.b(x)
        ph = np.exp(-2j * self.prof.phase_Cminus(x))
        za = self.z * a
        k = np.empty(np.shape(x) + (2, 2), dtype=np.complex128) \
            if np.ndim(x) else np.empty((2, 2), dtype=np.complex128)
        k[..., 0, 0] = 1j * b
        k[..., 0, 1] = -za
        k[..., 1, 0] = za
        k[..., 1, 1] = -1j * b
        return ph[..., None, None] * k if np.ndim(x) else ph * k

    def norm1(self, x):
        """Column-sum norm |z| a + b (the series convergence rate)."""
        return abs(self.z) * self.prof.a(x) + self.prof.b(x)


@dataclass
class JostMatrix:
    """Sampled hatted Jost solution F_hat with its defining asymptotics.

    values[i] is F_hat(x_samples[i]); side 'right' means
    F_hat e^{-i G1 lam x} -> I_4 at x -> -inf, side 'left' at +inf.
    error_estimate bounds the effect of the domain truncation.
    """

    side: str
    lam: float
    z: complex
    x_samples: np.ndarray
    values: np.ndarray
    x_min: float
    x_max: float
    error_estimate: float
    method: str
    n_steps: int = 0

    def value(self, x) -> np.ndarray:
        """F_hat at a stored sample point (exact match)."""
        i = int(np.argmin(np.abs(self.x_samples - x)))
        if abs(self.x_samples[i] - x) > 1e-9 * (1.0 + abs(x)):
            raise KeyError(f"x={x} is not a stored sample point")
        return self.values[i]

    def faddeev(self) -> np.ndarray:
        """M = F_hat e^{-i G1 lam x} at all samples."""
        ph = np.exp(-1j * self.lam * self.x_samples)
        out = self.values.copy()
        out[:, :, :2] *= ph[:, None, None]
        out[:, :, 2:] *= np.conj(ph)[:, None, None]
        return out

    def to_csv_rows(self) -> np.ndarray:
        """x plus Re/Im of the 16 entries (33 columns) for plotting."""
        flat = self.values.reshape(len(self.x_samples), 16)
        return np.column_stack(
            [self.x_samples, flat.real, flat.imag]
        )


def _tail_solve(rate1: float, rate2: float, kappa: float, eps: float) -> float:
    """x with rate1 e^{kappa x} + rate2 e^{2 kappa x} = eps (kappa sign sets side)."""
    if rate1 <= 0.0 and rate2 <= 0.0:
        return -20.0 / abs(kappa) if kappa > 0 else 20.0 / abs(kappa)
    if rate1 > 0.0:
        x = np.log(eps / rate1) / kappa
    else:
        x = np.log(eps / rate2) / (2.0 * kappa)
    for _ in range(40):
        t = np.exp(kappa * x)
        f = rate1 * t + rate2 * t * t - eps
        df = kappa * (rate1 * t + 2.0 * rate2 * t * t)
        step = f / df
        x -= step
        if abs(step) < 1e-12 * (1.0 + abs(x)):
            break
    return x


def tail_error(prof: PotentialProfile, z: complex, x_min: float,
               x_max: float) -> float:
    """exp(neglected tail integral) - 1: the truncation's effect on M."""
    az = abs(z)
    L, R = prof.left, prof.right
    tl = (az * L.a + L.b) * np.exp(L.kappa * x_min) / L.kappa \
        + abs(L.cprime) * np.exp(2.0 * L.kappa * x_min) / (2.0 * L.kappa)
    tr = (az * R.a + R.b) * np.exp(R.kappa * x_max) / (-R.kappa) \
        + abs(R.cprime) * np.exp(2.0 * R.kappa * x_max) / (-2.0 * R.kappa)
    return float(np.expm1(tl + tr))


def truncation_range(prof: PotentialProfile, z: complex, tail_eps: float = 1e-12):
    """Domain [x_min, x_max] where |z| a + b + |c - c_pm| >= tail_eps, and the
    bound exp(neglected tail integral) - 1 on the induced Jost error."""
    az = abs(z)
    L, R = prof.left, prof.right
    x_min = _tail_solve(az * L.a + L.b, abs(L.cprime), L.kappa, tail_eps)
    x_max = _tail_solve(az * R.a + R.b, abs(R.cprime), R.kappa, tail_eps)
    return x_min, x_max, tail_error(prof, z, x_min, x_max)


def default_samples(x_min: float, x_max: float, n_identity: int = 30,
                    n_eval: int = 10) -> np.ndarray:
    """Identity-check points across the middle 80% plus extraction points in
    the middle half, deduplicated and sorted."""
    span = x_max - x_min
    ident = x_min + span * np.linspace(0.1, 0.9, n_identity)
    evalp = x_min + span * np.linspace(0.25, 0.75, n_eval)
    return np.unique(np.concatenate([[x_min], ident, evalp, [x_max]]))


def _restore_scale(prof, lam, z, side, x, n_scaled, x_min, x_max):
    """F_hat = e^{S(x)} N e^{i G1 lam x} from the scaled samples."""
    srate = abs(z.real)
    X = prof.liouville_X(x)
    B = prof.int_b(x)
    if side == "right":
        S = srate * (X - prof.liouville_X(x_min)) + (B - prof.int_b(x_min))
    else:
        S = srate * (prof.liouville_X(x_max) - X) + (prof.int_b(x_max) - B)
    out = n_scaled * np.exp(S)[:, None, None]
    ph = np.exp(1j * lam * x)
    out[:, :, :2] *= ph[:, None, None]
    out[:, :, 2:] *= np.conj(ph)[:, None, None]
    return out


def _check_z(z: complex, force: bool):
    if abs(z) > Z_MAX and not force:
        raise ValueError(
            f"|z| = {abs(z):.3g} exceeds {Z_MAX}; accuracy unproven there "
            "(pass force=True to override, or use the asymptotic predictions)"
        )


def faddeev_right_ode(lam: float, z: complex, prof: PotentialProfile,
                      tol: float = 1e-10, x_samples=None,
                      tail_eps: float = 1e-12, force: bool = False) -> JostMatrix:
    """Right Jost solution by adaptive integration of the scaled system."""
    return _jost_ode(lam, z, prof, tol, x_samples, tail_eps, force, "right")


def jost_left(lam: float, z: complex, prof: PotentialProfile,
              tol: float = 1e-10, x_samples=None,
              tail_eps: float = 1e-12, force: bool = False) -> JostMatrix:
    """Left Jost solution (integration from x_max backward)."""
    return _jost_ode(lam, z, prof, tol, x_samples, tail_eps, force, "left")


def _jost_ode(lam, z, prof, tol, x_samples, tail_eps, force, side):
    z = complex(z)
    _check_z(z, force)
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-13, 1e-6], got {tol}")
    x_min, x_max, err_est = truncation_range(prof, z, tail_eps)
    if x_samples is None:
        x_samples = default_samples(x_min, x_max)
    x_samples = np.unique(np.asarray(x_samples, dtype=float))
    if np.any(x_samples < x_min - 1e-9) or np.any(x_samples > x_max + 1e-9):
        raise ValueError("x_samples outside the truncated domain")
    x_samples = np.clip(x_samples, x_min, x_max)

    x0t, ht, ca, cb, ccm = prof.solver_tables()
    rate = 2.0 * abs(lam) + abs(z) * prof.a_max + prof.b_max + 0.5
    hmax = 1.0 / rate
    A, B8, C = _rk.tableau()
    Y0 = np.eye(4, dtype=np.complex128)
    srate = abs(z.real)

    if side == "right":
        xout = x_samples
        yout, nsteps, status = _rk.integrate_faddeev(
            x_min, x_max, xout, lam, z, srate, 1.0, tol, hmax,
            ca, cb, ccm, x0t, ht, A, B8, C, Y0)
        vals = yout
    else:
        xout = x_samples[::-1].copy()
        yout, nsteps, status = _rk.integrate_faddeev(
            x_max, x_min, xout, lam, z, srate, -1.0, tol, hmax,
            ca, cb, ccm, x0t, ht, A, B8, C, Y0)
        vals = yout[::-1]

    if status != 0:
        raise SolverError(
            f"step-size underflow integrating the {side} Jost solution "
            f"(lam={lam}, z={z})", {"n_steps": nsteps})

    values = _restore_scale(prof, lam, z, side, x_samples, vals, x_min, x_max)
    return JostMatrix(side=side, lam=lam, z=z, x_samples=x_samples,
                      values=values, x_min=x_min, x_max=x_max,
                      error_estimate=err_est, method="ode", n_steps=nsteps)


def volterra_grid(prof: PotentialProfile, lam: float, z: complex,
                  tail_eps: float = 1e-12, points_per_rate: float = 10.0,
                  hard_cap: int = 400_000) -> np.ndarray:
    """Uniform grid resolving both the potential scale and the oscillation."""
    x_min, x_max, _ = truncation_range(prof, z, tail_eps)
    rate = 2.0 * abs(lam) + abs(z) * prof.a_max + prof.b_max + 0.5
    h = 1.0 / (points_per_rate * rate)
    n = int(np.ceil((x_max - x_min) / h)) + 1
    if n > hard_cap:
        raise SolverError(f"Volterra grid would need {n} points (cap {hard_cap})")
    return np.linspace(x_min, x_max, n)


def faddeev_right_volterra(lam: float, z: complex, x_grid: np.ndarray,
                           prof: PotentialProfile, rel_tol: float = 1e-14,
                           force: bool = False) -> JostMatrix:
    """Right Jost solution by summing the iterated Volterra series.

    Convergence is guaranteed by the factorial bound: the k-th iterate is
    bounded by (int |z| a + b)^(2k)/(2k)!.  Termination: iterate sup-norm
    below rel_tol times the accumulated sum's sup-norm.
    """
    return _faddeev_volterra(lam, z, x_grid, prof, rel_tol, force, "right")


def faddeev_left_volterra(lam: float, z: complex, x_grid: np.ndarray,
                          prof: PotentialProfile, rel_tol: float = 1e-14,
                          force: bool = False) -> JostMatrix:
    """Left-side mirror of faddeev_right_volterra (series from x_max down)."""
    return _faddeev_volterra(lam, z, x_grid, prof, rel_tol, force, "left")


def _faddeev_volterra(lam, z, x_grid, prof, rel_tol, force, side):
    z = complex(z)
    _check_z(z, force)
    x_grid = np.asarray(x_grid, dtype=float)
    h = x_grid[1] - x_grid[0]
    if not np.allclose(np.diff(x_grid), h, rtol=1e-10):
        raise ValueError("x_grid must be uniform")

    rp = ReducedPotential(prof, z)
    kk = rp.k(x_grid)
    kd = rp.kdag(x_grid)
    pos = np.exp(2j * lam * x_grid)[:, None, None]
    neg = np.conj(pos)

    if side == "right":
        cum = lambda f: cumulative_integral(f, h)
    else:
        def cum(f):
            full = cumulative_integral(f, h)
            return full[-1] - full

    budget = abs(z) * prof.width_A() + prof.int_b_total()
    max_iter = int(0.5 * (budget + 10.0 * np.sqrt(budget + 1.0))) + 40
    sgn = 1.0 if side == "right" else -1.0

    eye = np.broadcast_to(np.eye(2, dtype=np.complex128), kk.shape).copy()

    def run_pair(first_is_upper: bool):
        # upper pair couples (M1, M3); lower pair couples (M4, M2)
        diag = eye.copy()
        off = np.zeros_like(diag)
        dk = eye.copy()
        inc = 1.0
        for it in range(max_iter):
            if first_is_upper:
                ok = sgn * 1j * neg * cum(pos * (kd @ dk))
                dk = sgn * -1j * cum(kk @ ok)
            else:
                ok = sgn * -1j * pos * cum(neg * (kk @ dk))
                dk = sgn * 1j * cum(kd @ ok)
            off += ok
            diag += dk
            sup = max(np.abs(diag).max(), np.abs(off).max(), 1.0)
            inc = max(np.abs(dk).max(), np.abs(ok).max())
            if not np.isfinite(inc) or inc > 1e40 * np.exp(min(budget, 600.0)):
                raise SolverError(
                    "Volterra iterate growth (series divergence)",
                    {"iteration": it, "iterate_norm": float(inc)})
            if inc < rel_tol * sup:
                return diag, off, it + 1
        raise SolverError(
            f"Volterra series did not reach {rel_tol} in {max_iter} iterates",
            {"max_iter": max_iter, "last_increment": float(inc)})

    m1, m3, it_a = run_pair(True)
    m4, m2, it_b = run_pair(False)

    n = len(x_grid)
    values = np.zeros((n, 4, 4), dtype=np.complex128)
    values[:, :2, :2] = m1
    values[:, :2, 2:] = m2
    values[:, 2:, :2] = m3
    values[:, 2:, 2:] = m4
    ph = np.exp(1j * lam * x_grid)
    values[:, :, :2] *= ph[:, None, None]
    values[:, :, 2:] *= np.conj(ph)[:, None, None]

    return JostMatrix(side=side, lam=lam, z=z, x_samples=x_grid,
                      values=values, x_min=x_grid[0], x_max=x_grid[-1],
                      error_estimate=tail_error(prof, z, x_grid[0], x_grid[-1]),
                      method="volterra", n_steps=it_a + it_b)


def coupling_coeffs(x: float, lam: float, z: complex, prof: PotentialProfile):
    """The four coupling coefficients of the second-order system,

        c1 = (a^2 b b' - a' a b^2) / ((z^2 a^2 + b^2) a^2)
        c2 = -i z (-a b' + a' b) / (z^2 a^2 + b^2)
        c3 = i (c - lam) c1
        c4 = (c - lam) z (-a b' + a' b) / (z^2 a^2 + b^2)

    (primes are x-derivatives).  Every term carries b or b', so all four
    vanish identically for a massless field.
    """
    a, b, c = prof.a(x), prof.b(x), prof.c(x)
    ap, bp = prof.a_x(x), prof.b_x(x)
    z = complex(z)
    den = z * z * a * a + b * b
    term_scale = abs(z * z) * np.asarray(a) ** 2 + np.asarray(b) ** 2
    if np.min(np.abs(np.atleast_1d(den))
              / np.maximum(np.atleast_1d(term_scale), 1e-300)) < 1e-12:
        raise ZeroDivisionError(
            f"z^2 a^2 + b^2 vanishes at x={x} (z={z}); coupling coefficients "
            "have a pole there")
    num = a * a * b * bp - ap * a * b * b
    c1 = num / (den * a * a)
    c2 = -1j * z * (-a * bp + ap * b) / den
    c3 = 1j * (c - lam) * c1
    c4 = (c - lam) * z * (-a * bp + ap * b) / den
    return c1, c2, c3, c4
