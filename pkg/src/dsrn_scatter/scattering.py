"""Scattering-data matrices and partial-wave S-matrices.

Both Jost solutions are fundamental, so F_hat_L = F_hat_R A_hat_L for an
x-independent 4x4 matrix A_hat_L; the flux identity F_hat^* G1 F_hat = G1
turns this into the pointwise extraction

    A_hat_L(lam, z) = G1 F_hat_R(x, lam, zbar)^* G1 F_hat_L(x, lam, z),
    A_hat_R(lam, z) = G1 F_hat_L(x, lam, zbar)^* G1 F_hat_R(x, lam, z),

whose x-constancy (x_spread) is itself a solver diagnostic.  In 2x2 blocks
A_hat_L = [[AL1, AL2], [AL3, AL4]], the hatted S-matrix is

    T_hat_L = AL1^{-1},  T_hat_R = AR4^{-1},
    L_hat = AL3 AL1^{-1} = -AR4^{-1} AR3,
    R_hat = -AL1^{-1} AL2 = AR2 AR4^{-1},

and the physical matrix dresses it with the phase constant beta:

    S = [[e^{-i beta} T_hat_L, e^{-2i beta} R_hat], [L_hat, e^{-i beta} T_hat_R]].

Matrix-identity residuals are reported relative to the operand scale: the
Jost matrices and A-blocks grow like e^{|Re z| A} (about e^{58} already at
n = 16 for the reference parameters), so relative residuals are the only
representable accuracy statement in doubles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jost import (
    GAMMA1,
    JostMatrix,
    default_samples,
    faddeev_right_ode,
    jost_left,
)
from .potentials import PotentialProfile

__all__ = [
    "ScatteringData",
    "PartialWaveSMatrix",
    "PoleOfReflectionError",
    "ExtractionInconsistencyError",
    "matrix_AL",
    "smatrix_hat",
    "smatrix_physical",
    "reflection_L",
    "extract_scattering",
    "compute_smatrix",
    "rel_residual",
]

_EYE2 = np.eye(2, dtype=np.complex128)
_EYE4 = np.eye(4, dtype=np.complex128)


class PoleOfReflectionError(ArithmeticError):
    """A_hat block singular at complex z (legitimate CAM pole); carries the
    singular values of the offending block."""

    def __init__(self, message, singular_values):
        super().__init__(message)
        self.singular_values = singular_values


class ExtractionInconsistencyError(RuntimeError):
    """x_spread of the extracted A_hat_L above threshold (solver tolerance)."""


def rel_residual(lhs: np.ndarray, rhs: np.ndarray, *extra_scales) -> float:
    """sup-norm of lhs - rhs, scaled by the largest participating magnitude."""
    scale = max(1.0, np.abs(lhs).max(), np.abs(rhs).max(), *extra_scales)
    return float(np.abs(lhs - rhs).max() / scale)


def _blocks(m: np.ndarray):
    return m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]


@dataclass
class ScatteringData:
    """A_hat_L and A_hat_R at one (lam, z), with extraction diagnostics."""

    AL: np.ndarray
    AR: np.ndarray
    lam: float
    z: complex
    x_spread: float
    residuals: dict = field(default_factory=dict)

    @property
    def AL_blocks(self):
        return _blocks(self.AL)

    @property
    def AR_blocks(self):
        return _blocks(self.AR)


def matrix_AL(lam: float, z: complex, f_right: JostMatrix, f_left: JostMatrix,
              eval_points, spread_tol: float = 1e-7) -> ScatteringData:
    """Extract A_hat_L (and A_hat_R) from a Jost pair at the eval points.

    For complex z the caller must supply f_right solved at conj(z) (the
    conjugate-adjoint pairing); at real z that is the ordinary right
    solution and A_hat_R is obtained from the same pair by the mirrored
    left pairing.  Raises ExtractionInconsistencyError when the pointwise
    extractions disagree beyond spread_tol (relative).
    """
    z = complex(z)
    eval_points = np.asarray(eval_points, dtype=float)
    als = []
    ars = []
    for x in eval_points:
        fr = f_right.value(x)
        fl = f_left.value(x)
        als.append(GAMMA1 @ fr.conj().T @ GAMMA1 @ fl)
        if z.imag == 0.0:
            ars.append(GAMMA1 @ fl.conj().T @ GAMMA1 @ fr)
    als = np.array(als)
    AL = als.mean(axis=0)
    if z.imag == 0.0:
        AR = np.array(ars).mean(axis=0)
    else:
        # complex z: the left pairing would need extra conj(z) solves; use
        # the defining inversion F_hat_L A_hat_R = F_hat_R (ill-conditioned
        # for large |Re z|, which the inverse_product residual will show)
        AR = np.linalg.pinv(AL)
    scale = max(np.abs(AL).max(), 1.0)
    x_spread = float(np.abs(als - AL).max() / scale)
    if x_spread > spread_tol:
        raise ExtractionInconsistencyError(
            f"A_hat_L extraction x-spread {x_spread:.3e} exceeds {spread_tol:.1e} "
            f"at lam={lam}, z={z}; tighten the solver tolerance"
        )

    data = ScatteringData(AL=AL, AR=AR, lam=lam, z=z, x_spread=x_spread)
    data.residuals = _relation_residuals(data)
    return data


def _relation_residuals(d: ScatteringData) -> dict:
    """Residuals (relative) of the block relations tying A_hat_L to A_hat_R."""
    al1, al2, al3, al4 = d.AL_blocks
    ar1, ar2, ar3, ar4 = d.AR_blocks
    s = max(np.abs(d.AL).max(), np.abs(d.AR).max(), 1.0)
    res = {
        # sign forced by (eqAL)+(equnit): AR1 AL1 + AR2 AL3 = I with
        # AR1 = AL1* requires AR2 = -AL3*
        "AR2_eq_minus_AL3star": rel_residual(ar2, -al3.conj().T, s),
        "AR3_eq_minus_AL2star": rel_residual(ar3, -al2.conj().T, s),
        "AL1_eq_AR1star": rel_residual(al1, ar1.conj().T, s),
        "AR4_eq_AL4star": rel_residual(ar4, al4.conj().T, s),
        "AL1sAL1_eq_I_plus_AL3sAL3": rel_residual(
            al1.conj().T @ al1, _EYE2 + al3.conj().T @ al3, s * s),
        "unitarity_left": rel_residual(
            al1 @ ar1 + al2 @ ar3, _EYE2, s * s),
        "unitarity_right": rel_residual(
            ar1 @ al1 + ar2 @ al3, _EYE2, s * s),
        # block form of A_hat_L A_hat_R = I (the defAR inversion, well-scaled)
        "inverse_product": rel_residual(d.AL @ d.AR, _EYE4, s * s),
    }
    return res


@dataclass
class PartialWaveSMatrix:
    """2x2 transmission/reflection blocks at one (lam, n) or complex z."""

    T_L: np.ndarray
    T_R: np.ndarray
    L: np.ndarray
    R: np.ndarray
    hatted: bool
    lam: float
    n: complex
    residuals: dict = field(default_factory=dict)

    @property
    def matrix(self) -> np.ndarray:
        s = np.empty((4, 4), dtype=np.complex128)
        s[:2, :2] = self.T_L
        s[:2, 2:] = self.R
        s[2:, :2] = self.L
        s[2:, 2:] = self.T_R
        return s

    def unitarity_defect(self) -> float:
        s = self.matrix
        return float(np.abs(s.conj().T @ s - _EYE4).max())

    def to_dict(self) -> dict:
        def pairs(m):
            return [[float(v.real), float(v.imag)] for v in m.ravel()]

        d = {
            "lambda": self.lam,
            "n": self.n.real if self.n.imag == 0.0 else
                [self.n.real, self.n.imag],
            "hatted": self.hatted,
            "blocks": {
                "TL": pairs(self.T_L),
                "R": pairs(self.R),
                "L": pairs(self.L),
                "TR": pairs(self.T_R),
            },
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }
        return d


def _invert_block(block: np.ndarray, name: str, z: complex) -> np.ndarray:
    sv = np.linalg.svd(block, compute_uv=False)
    if sv[-1] < 1e-13 * max(sv[0], 1.0):
        raise PoleOfReflectionError(
            f"{name} singular at z={z} (reflection pole)", singular_values=sv)
    return np.linalg.inv(block)


def smatrix_hat(lam: float, n, data: ScatteringData) -> PartialWaveSMatrix:
    """Hatted S-matrix from the scattering data blocks."""
    al1, al2, al3, al4 = data.AL_blocks
    ar1, ar2, ar3, ar4 = data.AR_blocks
    z = data.z
    t_l = _invert_block(al1, "A_hat_L1", z)
    t_r = _invert_block(ar4, "A_hat_R4", z)
    L = al3 @ t_l
    R = -t_l @ al2
    res = dict(data.residuals)
    res["x_spread"] = data.x_spread
    # both displayed forms of L and R must agree
    res["L_two_forms"] = rel_residual(L, -t_r @ ar3)
    res["R_two_forms"] = rel_residual(R, ar2 @ t_r)
    s = PartialWaveSMatrix(T_L=t_l, T_R=t_r, L=L, R=R, hatted=True,
                           lam=lam, n=complex(n), residuals=res)
    s.residuals["unitarity"] = s.unitarity_defect()
    return s


def smatrix_physical(lam: float, n, hat: PartialWaveSMatrix,
                     beta: float) -> PartialWaveSMatrix:
    """Dress the hatted S-matrix with the phase constant beta."""
    if not hat.hatted:
        raise ValueError("smatrix_physical expects a hatted S-matrix")
    ph = np.exp(-1j * beta)
    s = PartialWaveSMatrix(
        T_L=ph * hat.T_L, T_R=ph * hat.T_R, L=hat.L.copy(),
        R=ph * ph * hat.R, hatted=False, lam=lam, n=complex(n),
        residuals=dict(hat.residuals),
    )
    s.residuals["unitarity"] = s.unitarity_defect()
    return s


def extract_scattering(lam: float, z: complex, prof: PotentialProfile,
                       tol: float = 1e-10, tail_eps: float = 1e-12,
                       n_eval: int = 10, x_samples=None,
                       spread_tol: float = 1e-7):
    """Solve the Jost pair and extract the scattering data at one (lam, z).

    Returns (data, f_right, f_left).  At complex z the right solve is done
    at conj(z), per the conjugate-adjoint pairing.
    """
    from .jost import truncation_range

    z = complex(z)
    x_min, x_max, _ = truncation_range(prof, z, tail_eps)
    if x_samples is None:
        x_samples = default_samples(x_min, x_max, n_eval=n_eval)
    span = x_max - x_min
    eval_points = x_min + span * np.linspace(0.25, 0.75, n_eval)
    # eval points must be actual samples
    x_samples = np.unique(np.concatenate([x_samples, eval_points]))

    zr = np.conj(z)
    f_right = faddeev_right_ode(lam, zr, prof, tol=tol, x_samples=x_samples,
                                tail_eps=tail_eps)
    f_left = jost_left(lam, z, prof, tol=tol, x_samples=x_samples,
                       tail_eps=tail_eps)
    data = matrix_AL(lam, z, f_right, f_left, eval_points,
                     spread_tol=spread_tol)
    return data, f_right, f_left


def compute_smatrix(lam: float, n, prof: PotentialProfile,
                    tol: float = 1e-10, tail_eps: float = 1e-12,
                    physical: bool = True,
                    spread_tol: float = 1e-7) -> PartialWaveSMatrix:
    """Full pipeline: Jost pair -> A_hat -> (physical) S(lam, n)."""
    data, _, _ = extract_scattering(lam, n, prof, tol=tol, tail_eps=tail_eps,
                                    spread_tol=spread_tol)
    hat = smatrix_hat(lam, n, data)
    if not physical:
        return hat
    return smatrix_physical(lam, n, hat, prof.phase_beta())


def smatrix_hat_from_right(lam: float, n, prof: PotentialProfile,
                           tol: float = 1e-7,
                           tail_eps: float = 1e-8) -> PartialWaveSMatrix:
    """Hatted S-matrix from a single right solve (real n only).

    At the right truncation point the left Jost solution equals its
    boundary value e^{i G1 lam x} up to the tail bound, so
    A_hat_L = G1 F_hat_R(x_max)^* G1 e^{i G1 lam x_max} to the same
    accuracy, and A_hat_R follows from the real-z conjugation
    G1 A_hat_L^* G1.  Used by batch inversion, where the halved cost
    matters and the x-spread diagnostic of the two-solve path is not
    needed.
    """
    n = complex(n)
    if n.imag != 0.0:
        raise ValueError("single-solve extraction requires real n")
    from .jost import truncation_range

    x_min, x_max, _ = truncation_range(prof, n, tail_eps)
    f_right = faddeev_right_ode(lam, n, prof, tol=tol,
                                x_samples=np.array([x_max]),
                                tail_eps=tail_eps)
    ph = np.exp(1j * lam * x_max)
    bdry = np.diag([ph, ph, np.conj(ph), np.conj(ph)])
    AL = GAMMA1 @ f_right.values[0].conj().T @ GAMMA1 @ bdry
    AR = GAMMA1 @ AL.conj().T @ GAMMA1
    data = ScatteringData(AL=AL, AR=AR, lam=lam, z=n, x_spread=0.0)
    data.residuals = _relation_residuals(data)
    return smatrix_hat(lam, n, data)


def reflection_L(lam: float, n_set, prof: PotentialProfile,
                 tol: float = 1e-10, tail_eps: float = 1e-12,
                 spread_tol: float = 1e-7) -> dict:
    """Batch L(lam, n) over the partial waves in n_set (physical = hatted:
    the stationary representation leaves L unphased).  Errors propagate
    per n, tagged with the failing wave."""
    if len(n_set) == 0:
        raise ValueError("n_set must be nonempty")
    out = {}
    for n in sorted(n_set):
        if not (float(n).is_integer() and n >= 1):
            raise ValueError(f"partial-wave index must be a positive integer, got {n}")
        try:
            s = compute_smatrix(lam, int(n), prof, tol=tol,
                                tail_eps=tail_eps, spread_tol=spread_tol)
        except Exception as exc:
            raise type(exc)(f"partial wave n={n}: {exc}") from exc
        out[int(n)] = s.L
    return out
