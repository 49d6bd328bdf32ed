"""Modified Bessel functions I_nu, K_nu of complex order and argument.

Production evaluation is the defining power series

    I_nu(z) = sum_k (z/2)^{nu+2k} / (Gamma(k+nu+1) k!)

(principal branch of (z/2)^nu, |arg z| < pi), truncated when terms fall
below 1e-18 of the partial sum, with a hand-off to the leading-order
large-argument form

    I_nu(z) ~ e^z / sqrt(2 pi z) + e^{-z + sg(Im z) i pi (nu + 1/2)} / sqrt(2 pi z)

beyond |z| = CROSSOVER (sg(0) = 0 by convention, so on the positive real
axis the branch factor is dropped as printed).  K is formed from
K_nu = (pi/2)(I_{-nu} - I_nu)/sin(nu pi), which requires nu away from the
integers; the orders used downstream all have Re nu = +-1/2.

The orders arising here are nu_pm = 1/2 - i(lam - c_pm)/kappa_pm and their
conjugates/negatives; no uniform (large-order) asymptotics are provided.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma as cgamma

__all__ = [
    "CROSSOVER",
    "BesselEvaluationError",
    "IllConditionedOrderError",
    "bessel_I",
    "bessel_K",
    "bessel_I_asymptotic",
    "bessel_I_series",
]

CROSSOVER = 30.0
_MAX_TERMS = 500
_ARG_GUARD = 1e-3  # asymptotic form invalid within this of the negative real axis


class BesselEvaluationError(ArithmeticError):
    """Series failed to converge (term growth past the term cap)."""


class IllConditionedOrderError(ValueError):
    """K_nu requested for nu within 1e-8 of an integer."""


def _sg(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def bessel_I_series(nu: complex, z: complex) -> complex:
    """Power-series evaluation (no crossover), |arg z| < pi."""
    nu = complex(nu)
    z = complex(z)
    if z == 0.0:
        if nu == 0.0:
            return 1.0 + 0.0j
        if nu.real > 0.0:
            return 0.0 + 0.0j
        raise ValueError("I_nu(0) diverges for Re nu <= 0, nu != 0")
    if z.real < 0.0 and z.imag == 0.0:
        raise ValueError("principal branch requires |arg z| < pi")

    half = z / 2.0
    term = np.exp(nu * np.log(half)) / cgamma(nu + 1.0)
    total = term
    hh = half * half
    prev = abs(term)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(_MAX_TERMS):
            term = term * hh / ((k + 1.0) * (nu + k + 1.0))
            if not np.isfinite(term):
                raise BesselEvaluationError(
                    f"I_nu series term overflow at k={k} (nu={nu}, z={z})"
                )
            total += term
            mag = abs(term)
            if mag < 1e-18 * abs(total) and mag <= prev:
                return complex(total)
            prev = mag
    raise BesselEvaluationError(
        f"I_nu series did not converge after {_MAX_TERMS} terms "
        f"(nu={nu}, z={z}, last |term|={prev:.3e})"
    )


def bessel_I_asymptotic(nu: complex, z: complex) -> complex:
    """Leading large-|z| form, valid for |arg z| <= pi - 1e-3 and |z| > 5."""
    nu = complex(nu)
    z = complex(z)
    if abs(np.angle(z)) > np.pi - _ARG_GUARD:
        raise ValueError(
            "asymptotic form invalid near the negative real axis; "
            "extend by parity of the full entire combination"
        )
    if abs(z) <= 5.0:
        raise ValueError("asymptotic form requires |z| > 5")
    root = np.sqrt(2.0 * np.pi * z)
    branch = np.exp(-z + _sg(z.imag) * 1j * np.pi * (nu + 0.5))
    return complex((np.exp(z) + branch) / root)


def bessel_I(nu: complex, z: complex, crossover: float = CROSSOVER) -> complex:
    """I_nu(z): series below |z| = crossover, asymptotic leading form above.

    The default hand-off at 30 is adequate for moderate orders; for large
    |Im nu| the leading asymptotic needs |z| >> |nu|^2, so callers in that
    regime should raise the crossover (see bessel_I_extended).
    """
    z = complex(z)
    if abs(z) > crossover:
        return bessel_I_asymptotic(nu, z)
    return bessel_I_series(nu, z)


_SERIES_ARG_CAP = 240.0     # series terms stay < ~1e104, ~250 terms
_SERIES_CANCEL_CAP = 20.0   # nats of cancellation tolerated off the real axis


def bessel_I_extended(nu: complex, z: complex) -> complex:
    """Order-aware evaluation: prefers the series as long as it is accurate.

    The series loses ~e^{|z| - |Re z|} of precision to cancellation away
    from the real axis, and its term count grows with |z|; within those
    limits it beats the leading-order asymptotic whenever |Im nu| is not
    small (corrections to the asymptotic scale like nu^2/z).
    """
    z = complex(z)
    if abs(z) <= _SERIES_ARG_CAP and abs(z) - abs(z.real) <= _SERIES_CANCEL_CAP:
        return bessel_I_series(nu, z)
    return bessel_I_asymptotic(nu, z)


_K_ASYM_SWITCH = 10.0


def bessel_K(nu: complex, z: complex) -> complex:
    """K_nu = (pi/2)(I_{-nu} - I_nu)/sin(nu pi), nu not within 1e-8 of an integer.

    The defining subtraction cancels like e^{2 Re z}, so beyond
    Re z = 10 the classical large-argument series

        K_nu(z) ~ sqrt(pi/(2z)) e^{-z} sum_k prod_{j<=k}(4 nu^2 - (2j-1)^2)
                                              / (k! (8z)^k)

    (truncated at its smallest term) takes over; in doubles it is the only
    way to keep any relative accuracy there.
    """
    nu = complex(nu)
    z = complex(z)
    if abs(nu - round(nu.real)) < 1e-8 and abs(nu.imag) < 1e-8:
        raise IllConditionedOrderError(
            f"K_nu ill-conditioned for near-integer order nu={nu}"
        )
    if z.real > _K_ASYM_SWITCH:
        return _bessel_K_asymptotic(nu, z)
    return complex(
        (np.pi / 2.0)
        * (bessel_I(-nu, z) - bessel_I(nu, z))
        / np.sin(nu * np.pi)
    )


def _bessel_K_asymptotic(nu: complex, z: complex) -> complex:
    term = 1.0 + 0.0j
    total = term
    fournu2 = 4.0 * nu * nu
    prev = abs(term)
    for k in range(1, 30):
        term = term * (fournu2 - (2.0 * k - 1.0) ** 2) / (k * 8.0 * z)
        if abs(term) >= prev:  # asymptotic series: stop at the smallest term
            break
        total += term
        prev = abs(term)
    return complex(np.sqrt(np.pi / (2.0 * z)) * np.exp(-z) * total)


def bessel_I_derivative(nu: complex, z: complex) -> complex:
    """dI_nu/dz = (I_{nu-1} + I_{nu+1})/2 (three-term structure)."""
    return (bessel_I(nu - 1.0, z) + bessel_I(nu + 1.0, z)) / 2.0
