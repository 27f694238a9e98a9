"""Closed forms for Gaussian codebooks under squared error."""

import numpy as np

from ..distortion import DistortionExtremes
from ..distributions import Gaussian
from ..errors import DomainError
from .dual import RateSolution

LOG2E = 1.0 / np.log(2.0)


def _v(sigma_sq, tau_sq, D):
    return 0.5 * (tau_sq + np.sqrt(tau_sq**2 + 4.0 * D * sigma_sq))


def lambda_star_gaussian(sigma_sq, tau_sq, D):
    """Root of ``Lambda'(lam) = D``: ``(2D - tau^2 - Delta) / (4 D tau^2)``.

    ``Delta = sqrt(tau^4 + 4 D sigma^2)``.
    """
    delta = np.sqrt(tau_sq**2 + 4.0 * D * sigma_sq)
    return (2.0 * D - tau_sq - delta) / (4.0 * D * tau_sq)


def log_mgf_gaussian(lam, sigma_sq, tau_sq):
    """``Lambda(lam)`` in nats for ``P`` with variance ``sigma_sq`` and ``Q = N(0, tau_sq)``."""
    u = 1.0 - 2.0 * lam * tau_sq
    return -0.5 * np.log(u) + lam * sigma_sq / u


def favorite_gaussian_variance(sigma_sq, tau_sq, lam):
    """Variance of ``Q*`` when the source itself is ``N(0, sigma_sq)``."""
    a = 0.5 / tau_sq - lam
    return 0.5 / a + (lam / a) ** 2 * sigma_sq


def favorite_density(y, lam, tau_sq, P):
    """Density of ``Q*`` for ``Q = N(0, tau_sq)`` and an arbitrary source law ``P``.

    Evaluates ``sqrt(a/pi) E_P exp(-(y sqrt(a) - X |lam| / sqrt(a))**2)`` with
    ``a = 1/(2 tau^2) - lam``; as ``tau^2 -> inf`` this tends to
    ``E_P[phi_D(y - X)]``.
    """
    y = np.asarray(y, dtype=float)
    a = 0.5 / tau_sq - lam
    c = abs(lam) / a
    if getattr(P, "is_discrete", False):
        xs, ps = P.values(), P.probs
        terms = np.exp(-a * (y[..., None] - c * xs) ** 2) @ ps
        return np.sqrt(a / np.pi) * terms
    if isinstance(P, Gaussian):
        var = 0.5 / a + c**2 * P.variance
        return np.exp(-((y - c * P.mean) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    raise TypeError(f"unsupported source law {P!r}")


def _kl_gauss_nats(var_p, var_q):
    r = var_p / var_q
    return 0.5 * (r - 1.0 - np.log(r))


def rate_pqd_gaussian(sigma_sq, tau_sq, D) -> RateSolution:
    """``R(P, N(0, tau^2), D)`` for a zero-mean source with variance ``sigma^2``.

    The rate depends on ``P`` only through ``sigma^2``; the favorite type
    and gap returned alongside assume ``P = N(0, sigma^2)``.
    """
    if not (sigma_sq > 0 and tau_sq > 0):
        raise DomainError("variances must be positive")
    if not D > 0:
        raise DomainError("D must be positive (the rate is infinite at D = 0)")
    ext = DistortionExtremes(0.0, sigma_sq + tau_sq)
    if D >= sigma_sq + tau_sq:
        return RateSolution(
            D=float(D),
            lambda_star=0.0,
            rate_bits=0.0,
            lmi_bits=0.0,
            gap_bits=0.0,
            q_star=Gaussian(tau_sq),
            extremes=ext,
            log_mgf_value=0.0,
        )
    v = _v(sigma_sq, tau_sq, D)
    rate = 0.5 * np.log2(v / D) - LOG2E * (v - D) * (v - sigma_sq) / (2.0 * v * tau_sq)
    lam = lambda_star_gaussian(sigma_sq, tau_sq, D)
    var_star = favorite_gaussian_variance(sigma_sq, tau_sq, lam)
    gap = _kl_gauss_nats(var_star, tau_sq) * LOG2E
    return RateSolution(
        D=float(D),
        lambda_star=float(lam),
        rate_bits=float(rate),
        lmi_bits=float(rate - gap),
        gap_bits=float(gap),
        q_star=Gaussian(var_star),
        extremes=ext,
        log_mgf_value=float(log_mgf_gaussian(lam, sigma_sq, tau_sq)),
    )
