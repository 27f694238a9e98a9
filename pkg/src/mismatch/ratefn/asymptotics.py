"""Shannon-lower-bound and flat-codebook quantities for difference distortions."""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ..distortion import PowerR, max_entropy
from ..distributions import ExponentialFamily, Gaussian
from ..errors import ModelError

LOG2E = 1.0 / np.log(2.0)


def slb_bound(Q, distortion, D) -> float:
    """``log(1/Q_max) - h_max(D)`` in bits; a lower bound on ``R(P, Q, D)`` for every ``P``."""
    if not isinstance(distortion, PowerR):
        raise NotImplementedError("lower bound needs a difference distortion")
    return float(-np.log2(Q.peak) - max_entropy(distortion, D).h_max_bits)


# --------------------------------------------------------------------------
# the law of X + Z_D


class _SumLaw:
    """Density of ``X + Z`` for a source marginal ``X`` and independent noise ``Z``."""

    def __init__(self, P, noise):
        self.P, self.noise = P, noise
        if getattr(P, "is_discrete", False):
            xs = P.values()
            keep = P.probs > 0
            self.atoms, self.weights = xs[keep], P.probs[keep]
        elif not isinstance(P, Gaussian):
            raise TypeError(f"unsupported source law {P!r}")

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        P, Z = self.P, self.noise
        if getattr(P, "is_discrete", False):
            return Z.pdf(y[..., None] - self.atoms) @ self.weights
        if isinstance(Z, Gaussian):
            return Gaussian(P.variance + Z.variance, P.mean + Z.mean).pdf(y)
        return _gauss_laplace_pdf(y - P.mean, P.variance, Z.scale)

    def breakpoints(self):
        if getattr(self.P, "is_discrete", False):
            return sorted(set(self.atoms.tolist()))
        return [self.P.mean]

    def span(self):
        zs = self.noise.scale
        if getattr(self.P, "is_discrete", False):
            return self.atoms.min() - 60 * zs, self.atoms.max() + 60 * zs
        s = np.sqrt(self.P.variance) + zs
        return self.P.mean - 60 * s, self.P.mean + 60 * s

    def expect(self, fn):
        return self.integrate(lambda y: fn(y) * float(self.pdf(y)))

    def entropy_bits(self):
        def integrand(y):
            f = float(self.pdf(y))
            return -f * np.log2(f) if f > 0 else 0.0

        return self.integrate(integrand)

    def integrate(self, fn):
        lo, hi = self.span()
        pts = [p for p in self.breakpoints() if lo < p < hi]
        edges = [lo, *pts, hi]
        return sum(
            integrate.quad(fn, a, b, epsabs=1e-14, epsrel=1e-12, limit=500)[0]
            for a, b in zip(edges[:-1], edges[1:])
        )


def _gauss_laplace_pdf(y, var, b):
    """Density of ``N(0, var) + Laplace(b)``, evaluated without overflow."""
    s = np.sqrt(var)
    y = np.asarray(y, dtype=float)

    def term(sign):
        u = (var / b - sign * y) / (s * np.sqrt(2))
        safe = np.exp(-(y**2) / (2 * var)) * special.erfcx(np.maximum(u, 0))
        raw = np.exp(var / (2 * b * b) - sign * y / b) * special.erfc(np.minimum(u, 0))
        return np.where(u >= 0, safe, raw)

    return (term(1) + term(-1)) / (4 * b)


def additive_mi(P, distortion, D) -> float:
    """``I(X; X + Z_D)`` in bits, where ``Z_D`` is the max-entropy noise at level ``D``."""
    P = getattr(P, "marginal", P)
    noise = max_entropy(distortion, D)
    if isinstance(P, Gaussian) and isinstance(noise.noise, Gaussian):
        return float(0.5 * np.log2(1.0 + P.variance / D))
    return float(_SumLaw(P, noise.noise).entropy_bits() - noise.h_max_bits)


def cstar_interval(distortion, D=None):
    """Known bounds (bits) on ``sup_U I(U; U + Z_D)`` for ``|y - x|^r`` distortions."""
    if not isinstance(distortion, PowerR):
        raise NotImplementedError("only r-th power distortions are covered")
    if distortion.power == 2.0:
        return (0.5, 0.5)
    return (0.5, 1.0)


# --------------------------------------------------------------------------
# flat codebooks


@dataclass(frozen=True)
class AsymptoteReport:
    """Bounds on ``R(P, Q_s, D)`` for an exponential-family codebook (bits).

    ``gap`` is measured as ``upper - slb``; ``predicted_gap`` is
    ``s E[g(X + Z_D)] log e`` evaluated independently.
    """

    slb_bits: float
    upper_bits: float
    gap: float
    predicted_gap: float
    additive_mi_bits: float
    mean_shape: float


def flat_asymptote(P, Q_s: ExponentialFamily, distortion, D) -> AsymptoteReport:
    """Lower and upper bounds for a (nearly flat) exponential-family codebook."""
    P = getattr(P, "marginal", P)
    noise = max_entropy(distortion, D)
    h = noise.h_max_bits
    law = _SumLaw(P, noise.noise)
    slb = float(-np.log2(Q_s.normalizer) - h)

    # E_{f_Y}[-log f_Q(Y)] by quadrature of the codebook log-density
    cross = law.expect(lambda y: -float(Q_s.logpdf(y)) * LOG2E)
    upper = float(cross - h)

    mean_shape = _mean_shape(P, noise.noise, Q_s, law)
    if not np.isfinite(mean_shape):
        raise ModelError("E[g(X + Z_D)] diverges")
    return AsymptoteReport(
        slb_bits=slb,
        upper_bits=upper,
        gap=upper - slb,
        predicted_gap=float(Q_s.s * mean_shape * LOG2E),
        additive_mi_bits=additive_mi(P, distortion, D),
        mean_shape=float(mean_shape),
    )


def _mean_shape(P, Z, Q_s, law):
    """``E[g(X + Z)]``; closed form for ``g = y^2`` with moments, else quadrature."""
    if Q_s.power == 2.0:
        if getattr(P, "is_discrete", False):
            m2 = float(P.probs @ P.values() ** 2)
        else:
            m2 = P.variance + P.mean**2
        z2 = Z.variance if isinstance(Z, Gaussian) else 2 * Z.scale**2
        return m2 + z2
    return law.expect(lambda y: float(Q_s.g(y)))
