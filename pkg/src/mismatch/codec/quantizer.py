"""Scalar quantizers meeting the distortion level everywhere (fallback channel)."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import log_ndtr

from ..distributions import DiscreteDistribution, Gaussian
from ..errors import DomainError, ModelError
from .elias import elias_length

LN2 = np.log(2.0)
TAIL_MASS = 1e-15


@dataclass
class ScalarQuantizerWQC:
    """A quantizer ``q`` with ``rho(x, q(x)) <= D`` and the law ``mu`` of ``q(X)``.

    ``kind`` is ``"discrete"`` (a symbol map) or ``"grid"`` (uniform cells of
    width ``step`` on the real line; cell ``k`` reproduces ``k * step``).
    Grid cells with ``|k| > K`` share one escape codeword, followed by a
    sign bit and the Elias code of ``|k| - K``.
    """

    kind: str
    D: float
    mapping: dict = field(default_factory=dict, repr=False)
    mu: dict = field(default_factory=dict, repr=False)
    step: Optional[float] = None
    K: Optional[int] = None
    escape_mass: float = 0.0
    log_mu_fn: Optional[object] = field(default=None, repr=False)

    def quantize(self, x):
        if self.kind == "discrete":
            try:
                return self.mapping[x]
            except (KeyError, TypeError):
                raise DomainError(f"{x!r} is outside the quantizer alphabet") from None
        return self.step * np.rint(np.asarray(x, dtype=float) / self.step)

    def cell(self, x) -> int:
        return int(np.rint(float(x) / self.step))

    def code_length(self, x) -> int:
        """``ceil(-log2 mu(q(x)))`` bits (plus escape overhead off the grid core)."""
        if self.kind == "discrete":
            return _bits(self.mu[self.quantize(x)])
        k = self.cell(x)
        if abs(k) <= self.K:
            return _bits(self.mu[k])
        return _bits(self.escape_mass) + 1 + elias_length(abs(k) - self.K)

    def fallback_bits(self, x_block) -> int:
        return int(sum(self.code_length(x) for x in x_block))

    def entropy_bits(self) -> float:
        p = np.array([m for m in self.mu.values() if m > 0])
        return float(-(p * np.log2(p)).sum())

    def m_p(self, p: float = 2.0) -> float:
        """``(E[(-log2 mu(q(X)))^p])^{1/p}``; finite values certify the strong condition."""
        if self.kind == "discrete":
            masses = np.array(list(self.mu.values()))
            logs = np.log2(masses[masses > 0])
            return float((np.exp2(logs) @ (-logs) ** p) ** (1 / p))
        # sum far into the tail using log masses so no cell underflows
        k = np.arange(-40 * self.K - 40, 40 * self.K + 41)
        logs = self.log_mu_fn(k) / LN2
        w = np.exp2(logs)
        return float((w @ (-logs) ** p) ** (1 / p))


def _bits(mass):
    if mass <= 0:
        raise ModelError("symbol has zero probability under the quantizer law")
    return int(math.ceil(-math.log2(mass) - 1e-12))


def _discrete_wqc(P: DiscreteDistribution, distortion, D, repro):
    repro = list(P.support) if repro is None else list(repro)
    M = distortion.matrix(list(P.support), repro)
    mapping, mu = {}, {}
    for i, x in enumerate(P.support):
        j = int(np.argmin(M[i]))
        if M[i, j] > D:
            raise ModelError(f"no reproduction within distortion {D} of {x!r}")
        mapping[x] = repro[j]
        mu[repro[j]] = mu.get(repro[j], 0.0) + float(P.probs[i])
    return ScalarQuantizerWQC("discrete", D, mapping=mapping, mu=mu)


def _log_cell_masses(law, step):
    """``log P(X in [(k - 1/2) step, (k + 1/2) step))`` as a vectorized function of ``k``."""
    if isinstance(law, Gaussian):
        s, m = law.scale, law.mean

        def log_mu(k):
            k = np.asarray(k, dtype=float)
            a = ((k - 0.5) * step - m) / s
            b = ((k + 0.5) * step - m) / s
            # evaluate on the side of zero with the smaller tail for accuracy
            hi = np.where(a > 0, log_ndtr(-a), log_ndtr(b))
            lo = np.where(a > 0, log_ndtr(-b), log_ndtr(a))
            return hi + np.log1p(-np.exp(np.minimum(lo - hi, 0.0)))

        return log_mu

    def log_mu(k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        out = np.array(
            [
                integrate.quad(law.pdf, (kk - 0.5) * step, (kk + 0.5) * step, epsabs=0, epsrel=1e-12)[0]
                for kk in k
            ]
        )
        with np.errstate(divide="ignore"):
            return np.log(out)

    return log_mu


def _grid_wqc(law, distortion, D):
    if D <= 0:
        raise DomainError("no scalar quantizer achieves D = 0 on a continuous alphabet")
    r = getattr(distortion, "power", None)
    if not getattr(distortion, "is_difference", False) or r is None:
        raise ModelError("grid quantizer needs a |y - x|^r distortion")
    step = 2.0 * D ** (1.0 / r)
    scale = getattr(law, "scale", 1.0)
    mean = getattr(law, "mean", 0.0)
    log_mu = _log_cell_masses(law, step)
    K = int(math.ceil((abs(mean) + 9.0 * scale) / step))
    ks = np.arange(-K, K + 1)
    masses = np.exp(log_mu(ks))
    escape = max(1.0 - masses.sum(), float(np.exp(log_mu(np.array([K + 1]))[0])))
    mu = {int(k): float(m) for k, m in zip(ks, masses)}
    return ScalarQuantizerWQC("grid", D, mu=mu, step=step, K=K, escape_mass=escape, log_mu_fn=log_mu)


def wqc_build(domain, distortion, D, source=None, repro=None) -> ScalarQuantizerWQC:
    """Build a quantizer with ``rho(x, q(x)) <= D`` for every source symbol.

    :param domain: a finite pmf (the source marginal), or a continuous law
        on the real line for a uniform grid of step ``2 D^{1/r}``
    :param source: optional source whose marginal defines ``mu``
    :param repro: reproduction symbols for a finite alphabet (defaults to
        the source alphabet, so the identity qualifies when ``rho(x, x) = 0``)
    """
    law = getattr(source, "marginal", source) if source is not None else getattr(domain, "marginal", domain)
    if getattr(law, "is_discrete", False):
        return _discrete_wqc(law, distortion, D, repro)
    return _grid_wqc(law, distortion, D)
