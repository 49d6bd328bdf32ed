"""Horizon structure of a de Sitter-Reissner-Nordstrom exterior.

The metric function

    F(r) = 1 - 2M/r + Q^2/r^2 - Lambda r^2 / 3

is admissible when r^2 F(r) (a quartic) has four simple real roots
r_n < 0 < r_c < r_minus < r_plus.  The exterior region is
(r_minus, r_plus), where F > 0.  Each root r_j carries a surface gravity
kappa_j = F'(r_j)/2; the event horizon has kappa_minus > 0 and the
cosmological horizon kappa_plus < 0.  The Regge-Wheeler coordinate

    x(r) = sum_j ln|r - r_j| / (2 kappa_j)        (integration constant 0)

satisfies dx/dr = 1/F and maps the exterior onto the whole real line,
pushing both horizons to x = -/+ infinity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BlackHoleParams",
    "HorizonData",
    "InadmissibleParametersError",
    "evaluate_F",
    "find_horizons",
    "regge_wheeler_x",
    "radius_from_x",
]

# Roots closer than this (relative to r_plus) are treated as degenerate:
# x(r) diverges logarithmically as kappa_j -> 0 and downstream quadrature
# loses accuracy long before the roots actually merge.
_DEGENERACY_RTOL = 1e-8


class InadmissibleParametersError(ValueError):
    """Raised when F has no simple-root horizon structure.

    Carries the root multiset actually found in ``roots`` (complex, as
    returned by the quartic solver) so callers can diagnose near-extremal
    or horizonless configurations.
    """

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots


@dataclass(frozen=True)
class BlackHoleParams:
    """Black-hole parameters (geometric units) plus the Dirac field data.

    M, Q, Lambda are the unknowns of the inverse problem; m_dirac and
    q_dirac (the field's mass and charge) are treated as known.
    """

    M: float
    Q: float
    Lambda: float
    m_dirac: float = 0.0
    q_dirac: float = 0.0

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if not self.Lambda > 0:
            raise ValueError(f"Lambda must be positive, got {self.Lambda}")
        if self.m_dirac < 0:
            raise ValueError(f"m_dirac must be >= 0, got {self.m_dirac}")

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "Q": self.Q,
            "Lambda": self.Lambda,
            "m_dirac": self.m_dirac,
            "q_dirac": self.q_dirac,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BlackHoleParams":
        return cls(
            M=float(d["M"]),
            Q=float(d["Q"]),
            Lambda=float(d["Lambda"]),
            m_dirac=float(d.get("m_dirac", 0.0)),
            q_dirac=float(d.get("q_dirac", 0.0)),
        )


@dataclass(frozen=True)
class HorizonData:
    """Quartic roots of r^2 F(r) and the associated surface gravities."""

    r_n: float
    r_c: float
    r_minus: float
    r_plus: float
    kappa_n: float
    kappa_c: float
    kappa_minus: float
    kappa_plus: float
    params: BlackHoleParams

    @property
    def roots(self) -> np.ndarray:
        return np.array([self.r_n, self.r_c, self.r_minus, self.r_plus])

    @property
    def kappas(self) -> np.ndarray:
        return np.array(
            [self.kappa_n, self.kappa_c, self.kappa_minus, self.kappa_plus]
        )

    def to_dict(self) -> dict:
        return {
            "roots": [self.r_n, self.r_c, self.r_minus, self.r_plus],
            "kappas": [
                self.kappa_n,
                self.kappa_c,
                self.kappa_minus,
                self.kappa_plus,
            ],
            "params": self.params.to_dict(),
        }


def evaluate_F(r, p: BlackHoleParams):
    """Metric function F(r) = 1 - 2M/r + Q^2/r^2 - Lambda r^2/3 for r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("F(r) is only evaluated for r > 0")
    out = 1.0 - 2.0 * p.M / r + p.Q**2 / r**2 - p.Lambda * r**2 / 3.0
    return float(out) if out.ndim == 0 else out


def _F_any(r, p: BlackHoleParams):
    # F extended to all r != 0 (used for Newton polish at the negative root).
    return 1.0 - 2.0 * p.M / r + p.Q**2 / r**2 - p.Lambda * r**2 / 3.0


def evaluate_Fprime(r, p: BlackHoleParams):
    """dF/dr = 2M/r^2 - 2Q^2/r^3 - 2 Lambda r/3."""
    r = np.asarray(r, dtype=float)
    out = 2.0 * p.M / r**2 - 2.0 * p.Q**2 / r**3 - 2.0 * p.Lambda * r / 3.0
    return float(out) if out.ndim == 0 else out


def _quartic_coeffs(p: BlackHoleParams) -> np.ndarray:
    # r^2 F(r) = -(Lambda/3) r^4 + r^2 - 2 M r + Q^2, descending powers.
    return np.array([-p.Lambda / 3.0, 0.0, 1.0, -2.0 * p.M, p.Q**2])


def find_horizons(p: BlackHoleParams) -> HorizonData:
    """Locate the four horizon roots and their surface gravities.

    Roots are captured globally as companion-matrix eigenvalues of the
    quartic r^2 F(r), then Newton-polished on the quartic to relative
    residual < 1e-14.  Raises InadmissibleParametersError when the root
    structure is not four simple reals with r_n < 0 < r_c < r_minus < r_plus
    (near-extremal pairs count as degenerate, see _DEGENERACY_RTOL).
    """
    coeffs = _quartic_coeffs(p)
    # Companion matrix of the monic quartic.
    monic = coeffs / coeffs[0]
    comp = np.zeros((4, 4))
    comp[0, :] = -monic[1:]
    comp[1:, :3] = np.eye(3)
    raw = np.linalg.eigvals(comp)

    scale = np.max(np.abs(raw))
    if np.any(np.abs(raw.imag) > 1e-9 * scale):
        raise InadmissibleParametersError(
            "quartic has complex horizon roots (no exterior region): "
            f"{np.sort_complex(raw)}",
            roots=raw,
        )
    roots = np.sort(raw.real)

    # Newton polish on the quartic from the eigenvalue seeds.
    poly = np.polynomial.Polynomial(coeffs[::-1])
    dpoly = poly.deriv()
    for _ in range(8):
        step = poly(roots) / dpoly(roots)
        roots = roots - step
        if np.max(np.abs(step)) < 1e-15 * np.max(np.abs(roots)):
            break

    r_n, r_c, r_minus, r_plus = roots
    if np.min(np.diff(roots)) < _DEGENERACY_RTOL * abs(r_plus):
        raise InadmissibleParametersError(
            f"degenerate (near-extremal) horizon roots: {roots}", roots=roots
        )
    if not (r_n < 0.0 < r_c < r_minus < r_plus):
        raise InadmissibleParametersError(
            f"horizon roots not in the pattern r_n < 0 < r_c < r_- < r_+: {roots}",
            roots=roots,
        )
    # Backward-error check on the quartic (relative to its term scale at
    # each root; |F(r_j)| itself amplifies rounding by 1/r^2 at small r_c).
    term_scale = sum(abs(c) * np.abs(roots) ** (4 - k)
                     for k, c in enumerate(coeffs))
    if np.max(np.abs(poly(roots)) / term_scale) > 1e-13:
        raise InadmissibleParametersError(
            f"root polish failed, quartic residuals {poly(roots)}",
            roots=roots,
        )

    kappas = evaluate_Fprime(roots, p) / 2.0
    return HorizonData(
        r_n=r_n,
        r_c=r_c,
        r_minus=r_minus,
        r_plus=r_plus,
        kappa_n=kappas[0],
        kappa_c=kappas[1],
        kappa_minus=kappas[2],
        kappa_plus=kappas[3],
        params=p,
    )


def regge_wheeler_x(r, h: HorizonData):
    """x(r) = sum_j ln|r - r_j|/(2 kappa_j) on the exterior (r_minus, r_plus)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= h.r_minus) or np.any(r >= h.r_plus):
        raise ValueError(
            f"r must lie strictly inside ({h.r_minus}, {h.r_plus})"
        )
    out = np.zeros_like(r)
    for rj, kj in zip(h.roots, h.kappas):
        out = out + np.log(np.abs(r - rj)) / (2.0 * kj)
    return float(out) if out.ndim == 0 else out


def _log_offset_constants(h: HorizonData):
    """C_-, C_+ : the non-divergent part of x(r) evaluated at each horizon.

    Near r_pm:  x = ln|r - r_pm|/(2 kappa_pm) + C_pm + O(|r - r_pm|).
    """
    roots, kappas = h.roots, h.kappas
    c_minus = sum(
        np.log(abs(h.r_minus - rj)) / (2.0 * kj)
        for rj, kj in zip(roots, kappas)
        if rj != h.r_minus
    )
    c_plus = sum(
        np.log(abs(h.r_plus - rj)) / (2.0 * kj)
        for rj, kj in zip(roots, kappas)
        if rj != h.r_plus
    )
    return c_minus, c_plus


def radius_from_x(x, h: HorizonData):
    """Invert the Regge-Wheeler map: the unique r in (r_minus, r_plus) with x(r) = x.

    Newton iteration runs in u = ln(r - r_minus) (for x below the midpoint
    image) or u = ln(r_plus - r) (above), seeded with the horizon
    asymptotics u ~ 2 kappa_pm (x - C_pm); the u parametrization keeps
    r - r_pm at full relative precision arbitrarily deep into the tails.
    Saturates to the horizon value (with a warning) once r - r_pm
    underflows, around |x| ~ 350/|kappa_pm|.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out, _, _ = _invert_rw(x, h)
    return float(out[0]) if scalar else out


def _radius_from_x_vec(x: np.ndarray, h: HorizonData) -> np.ndarray:
    return _invert_rw(x, h)[0]


def _rest_sum(r, h: HorizonData, skip: float):
    """x(r) minus the ln|r - skip_root| term (smooth near that root)."""
    out = np.zeros_like(np.asarray(r, dtype=float))
    for rj, kj in zip(h.roots, h.kappas):
        if rj == skip:
            continue
        out = out + np.log(np.abs(r - rj)) / (2.0 * kj)
    return out


def _rest_deriv(r, h: HorizonData, skip: float):
    out = np.zeros_like(np.asarray(r, dtype=float))
    for rj, kj in zip(h.roots, h.kappas):
        if rj == skip:
            continue
        out = out + 1.0 / ((r - rj) * 2.0 * kj)
    return out


def _invert_rw(x: np.ndarray, h: HorizonData):
    """Invert x(r), returning (r, r - r_minus, r_plus - r).

    The near-horizon gap is carried as e^u from the u-space Newton, so it
    stays accurate long after r itself has rounded onto the horizon value.
    """
    r_lo, r_hi = h.r_minus, h.r_plus
    width = r_hi - r_lo
    r_mid = 0.5 * (r_lo + r_hi)
    x_mid = regge_wheeler_x(r_mid, h)
    c_minus, c_plus = _log_offset_constants(h)

    r_out = np.empty_like(x)
    dm_out = np.empty_like(x)
    dp_out = np.empty_like(x)
    left = x <= x_mid

    for side in ("left", "right"):
        sel = left if side == "left" else ~left
        if not np.any(sel):
            continue
        xs = x[sel]
        if side == "left":
            kap, coff, root = h.kappa_minus, c_minus, h.r_minus
        else:
            kap, coff, root = h.kappa_plus, c_plus, h.r_plus
        u_cap = np.log(width / 2.0)

        u = np.minimum(2.0 * kap * (xs - coff), u_cap)
        saturated = u < -745.0  # exp(u) underflows even as a subnormal
        if np.any(saturated):
            warnings.warn(
                "radius_from_x: |x| so large that r saturates to the horizon "
                "radius at machine precision",
                RuntimeWarning,
                stacklevel=3,
            )
            u = np.maximum(u, -745.0)

        # Newton in u on phi(u) = u/(2 kap) + rest(r(u)) - x; phi' =
        # 1/(2 kap) + rest'(r) (+-e^u) = e^u / F > 0 in these variables.
        for _ in range(60):
            eu = np.exp(u)
            r = root + eu if side == "left" else root - eu
            phi = u / (2.0 * kap) + _rest_sum(r, h, root) - xs
            dphi = 1.0 / (2.0 * kap) + (1.0 if side == "left" else -1.0) \
                * _rest_deriv(r, h, root) * eu
            step = np.where(saturated, 0.0, phi / dphi)
            step = np.clip(step, -30.0, 30.0)
            u_new = np.minimum(u - step, u_cap)
            done = np.abs(u_new - u) < 1e-15 * (1.0 + np.abs(u))
            u = u_new
            if np.all(done):
                break
        eu = np.exp(u)
        if side == "left":
            r_out[sel] = r_lo + eu
            dm_out[sel] = eu
            dp_out[sel] = width - eu
        else:
            r_out[sel] = r_hi - eu
            dp_out[sel] = eu
            dm_out[sel] = width - eu
    return r_out, dm_out, dp_out


def exterior_F_factored(r, delta_minus, delta_plus, h: HorizonData):
    """F(r) in the factored form (Lambda/3)(r - r_n)(r - r_c) dm dp / r^2,
    exact to relative rounding even where the defining sum cancels to
    ~1e-30 of its terms (deep Regge-Wheeler tails)."""
    p = h.params
    return (p.Lambda / 3.0) * (r - h.r_n) * (r - h.r_c) \
        * delta_minus * delta_plus / r**2
