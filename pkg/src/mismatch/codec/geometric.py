"""The geometric law of the first-match index, truncated at the index cap."""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import DomainError

LOG2E = np.log2(np.e)
DIRECT_SUM_LIMIT = 10**7


@dataclass(frozen=True)
class TruncatedGeometric:
    """``Geom*(p)``: ``p(1-p)^{k-1}`` on ``1..cap`` and the rest ``(1-p)^cap`` at ``cap+1``."""

    p: float
    cap: int

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise DomainError("p must lie in (0, 1]")
        if int(self.cap) < 1:
            raise DomainError("cap must be at least 1")

    @property
    def tail(self):
        """Mass at ``cap + 1``."""
        return float(np.exp(self.cap * np.log1p(-self.p))) if self.p < 1 else 0.0

    def pmf(self, k):
        k = np.asarray(k, dtype=float)
        if self.p == 1.0:
            body = (k == 1).astype(float)
        else:
            body = self.p * np.exp((k - 1) * np.log1p(-self.p))
        out = np.where((k >= 1) & (k <= self.cap), body, 0.0)
        return np.where(k == self.cap + 1, self.tail, out)

    def cdf(self, k):
        k = np.floor(np.asarray(k, dtype=float))
        inside = -np.expm1(np.minimum(k, self.cap) * np.log1p(-self.p)) if self.p < 1 else (k >= 1) * 1.0
        return np.where(k < 1, 0.0, np.where(k >= self.cap + 1, 1.0, inside))

    def entropy_bits(self):
        return truncated_geometric_entropy(self.p, self.cap)

    def sample(self, u):
        """Inverse-CDF draws from uniforms in (0, 1); values above the cap map to ``cap + 1``.

        Returned as floats, since the cap may exceed the int64 range.
        """
        u = np.asarray(u, dtype=float)
        if self.p == 1.0:
            return np.ones(u.shape)
        k = 1.0 + np.floor(np.log(u) / np.log1p(-self.p))
        return np.where(k > self.cap, float(self.cap) + 1.0, k)


def truncated_geometric_entropy(p: float, cap: int) -> float:
    """Entropy of ``Geom*(p)`` truncated at ``cap`` (bits).

    Summed term by term up to ``DIRECT_SUM_LIMIT``; beyond that the finite
    arithmetico-geometric sum is evaluated in closed form.
    """
    if not (0.0 < p <= 1.0):
        raise DomainError("p must lie in (0, 1]")
    cap = int(cap)
    if cap < 1:
        raise DomainError("cap must be at least 1")
    if p == 1.0:
        return 0.0
    lr = np.log1p(-p)
    if cap <= DIRECT_SUM_LIMIT:
        j = np.arange(cap, dtype=float)
        logm = np.log(p) + j * lr
        m = np.exp(logm)
        h = -np.sum(m * logm)
    else:
        r = 1.0 - p
        t = np.exp(cap * lr)
        # sum_{j<cap} j r^j = r (1 - cap r^{cap-1} + (cap-1) r^cap) / (1-r)^2
        s = r * (1.0 - cap * t / r + (cap - 1) * t) / p**2
        h = -((1.0 - t) * np.log(p) + p * lr * s)
    tail = np.exp(cap * lr)
    if tail > 0:
        h -= tail * cap * lr
    return float(h) * LOG2E


def mixture_entropy(ps, weights, cap: int) -> float:
    """Exact entropy (bits) of a finite mixture of ``Geom*(p_j)`` with a common cap."""
    ps = np.asarray(ps, dtype=float)
    w = np.asarray(weights, dtype=float)
    if cap > DIRECT_SUM_LIMIT:
        raise DomainError("mixture entropy is summed directly; cap too large")
    k = np.arange(1, cap + 2, dtype=float)
    pmf = np.zeros(k.size)
    for pj, wj in zip(ps, w):
        pmf += wj * TruncatedGeometric(float(pj), cap).pmf(k)
    pos = pmf > 0
    return float(-np.sum(pmf[pos] * np.log2(pmf[pos])))


def mixture_entropy_bound(alpha: float) -> float:
    """``log2(e / alpha)``: entropy bound for mixtures of geometrics with ``p >= alpha``."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    return float(np.log2(np.e / alpha))


def geometric_fit(indices, p: float, cap: int, min_expected: float = 5.0):
    """Chi-square goodness of fit of observed indices to ``Geom*(p)``.

    Bins are consecutive index ranges merged until each expects at least
    ``min_expected`` counts.  Returns ``(statistic, pvalue, bins)``.
    """
    x = np.asarray(indices, dtype=np.int64)
    law = TruncatedGeometric(p, cap)
    total = x.size
    edges = [1]
    acc = 0.0
    k = 1
    limit = min(cap + 1, int(50 / p) + 10)
    while k <= limit:
        acc += float(law.pmf(k)) * total
        if acc >= min_expected:
            edges.append(k + 1)
            acc = 0.0
        k += 1
    edges[-1] = cap + 2
    edges = np.array(edges)
    observed = np.histogram(x, bins=edges)[0]
    cdf_hi = np.where(edges[1:] - 1 >= cap + 1, 1.0, law.cdf(edges[1:] - 1))
    cdf_lo = law.cdf(edges[:-1] - 1)
    expected = (cdf_hi - cdf_lo) * total
    expected *= observed.sum() / expected.sum()
    res = stats.chisquare(observed, expected)
    return float(res.statistic), float(res.pvalue), edges
