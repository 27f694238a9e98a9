"""Source and codebook laws.

Codebook laws (the per-letter distribution of i.i.d. codewords):

* :class:`DiscreteDistribution` -- a pmf on a finite ordered support;
* :class:`Gaussian` -- ``N(mean, variance)``;
* :class:`ExponentialFamily` -- density ``B_s * exp(-s * g(y))``.

Source models (the law of the process being compressed):

* :class:`DiscreteIID`, :class:`GaussianIID`, :class:`MarkovChain`.

All objects are immutable after construction.  Sampling is driven by the
counter-based streams in :mod:`mismatch.rng`, so ``(seed, stream)`` fixes
every draw.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from . import rng
from .errors import DomainError, SizeError

LN2 = np.log(2.0)
MAX_BLOCK_SUPPORT = 10**6


class DiscreteDistribution:
    """A probability mass function on an ordered, finite support.

    :param support: distinct symbols (numbers, strings or tuples)
    :param probs: masses, nonnegative and summing to one within 1e-12
    """

    def __init__(self, support: Sequence, probs: Sequence[float]):
        support = list(support)
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or len(support) != probs.size:
            raise ValueError("support and probs must have the same length")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum():.15g}, not 1")
        if len(set(support)) != len(support):
            raise ValueError("support entries must be distinct")
        self.support = tuple(support)
        self.probs = probs
        self.probs.setflags(write=False)
        self._index = {s: i for i, s in enumerate(self.support)}
        self._cdf = np.cumsum(probs)
        self._cdf[-1] = 1.0

    @classmethod
    def bernoulli(cls, p1: float):
        """Law on ``(0, 1)`` with mass ``p1`` at 1."""
        return cls((0, 1), (1.0 - p1, p1))

    @classmethod
    def point_mass(cls, symbol, support=None):
        support = (symbol,) if support is None else tuple(support)
        probs = [1.0 if s == symbol else 0.0 for s in support]
        return cls(support, probs)

    def __len__(self):
        return len(self.support)

    def __repr__(self):
        pairs = ", ".join(f"{s!r}: {p:.6g}" for s, p in zip(self.support, self.probs))
        return f"DiscreteDistribution({{{pairs}}})"

    @property
    def is_discrete(self):
        return True

    def index(self, symbol):
        try:
            return self._index[symbol]
        except (KeyError, TypeError):
            raise DomainError(f"{symbol!r} is not in the support") from None

    def indices(self, symbols):
        return np.array([self.index(s) for s in symbols], dtype=np.intp)

    def pmf(self, symbol):
        return float(self.probs[self.index(symbol)])

    def values(self):
        """Support as a float array (numeric supports only)."""
        return np.asarray(self.support, dtype=float)

    def entropy_bits(self):
        p = self.probs[self.probs > 0]
        return float(-(p * np.log2(p)).sum())

    def from_uniforms(self, u):
        """Support indices by inverse-CDF lookup of uniforms in (0, 1)."""
        idx = np.searchsorted(self._cdf, u, side="right")
        return np.minimum(idx, len(self.support) - 1)

    def sample_indices(self, count, seed, stream=0):
        return self.from_uniforms(rng.uniforms(seed, stream, count))

    def sample(self, count, seed, stream=0):
        idx = self.sample_indices(count, seed, stream)
        return [self.support[i] for i in idx]

    def mean(self):
        return float(self.probs @ self.values())


@dataclass(frozen=True)
class Gaussian:
    """``N(mean, variance)`` on the real line."""

    variance: float
    mean: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValueError("variance must be finite and positive")

    is_discrete = False

    @property
    def scale(self):
        return float(np.sqrt(self.variance))

    @property
    def peak(self):
        """Maximum of the density, attained at the mean."""
        return 1.0 / np.sqrt(2 * np.pi * self.variance)

    @property
    def argmax(self):
        return self.mean

    def logpdf(self, y):
        y = np.asarray(y, dtype=float)
        return -0.5 * np.log(2 * np.pi * self.variance) - (y - self.mean) ** 2 / (
            2 * self.variance
        )

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def from_uniforms(self, u):
        return self.mean + self.scale * special.ndtri(u)

    def sample(self, count, seed, stream=0):
        return self.from_uniforms(rng.uniforms(seed, stream, count))

    def second_moment(self):
        return self.variance + self.mean**2

    def entropy_bits(self):
        """Differential entropy in bits."""
        return 0.5 * np.log2(2 * np.pi * np.e * self.variance)


class ExponentialFamily:
    """Density ``f_s(y) = B_s * exp(-s * g(y))`` on the real line.

    ``g`` must be nonnegative, vanish at 0 and grow in ``|y|``.  By default
    ``g(y) = |y| ** power``; pass ``g`` to use another shape function (the
    law is then not serializable).  The normalizer ``B_s`` is found by
    adaptive quadrature on the region where ``g(y) < 60 / s``.
    """

    def __init__(self, s: float, power: float = 2.0, g: Optional[Callable] = None):
        if not (s > 0 and np.isfinite(s)):
            raise ValueError("scale s must be positive")
        self.s = float(s)
        self.power = float(power) if g is None else None
        if g is None:
            p = self.power
            g = lambda y: np.abs(y) ** p  # noqa: E731
        self.g = g
        if abs(float(g(0.0))) > 0:
            raise ValueError("shape function must satisfy g(0) = 0")
        self.half_width = self._truncation()
        mass, _ = integrate.quad(
            lambda y: np.exp(-self.s * self.g(y)),
            -self.half_width,
            self.half_width,
            points=[0.0],
            epsabs=1e-10,
            epsrel=1e-12,
            limit=400,
        )
        self.normalizer = 1.0 / mass
        self._table = None

    @classmethod
    def gaussian(cls, variance):
        """The member equal to ``N(0, variance)``."""
        return cls(s=1.0 / (2.0 * variance), power=2.0)

    is_discrete = False

    def _truncation(self):
        level = 60.0 / self.s
        width = 1.0
        while min(self.g(width), self.g(-width)) < level:
            width *= 2.0
            if width > 1e300:
                raise ValueError("shape function does not grow")
        return width

    def __repr__(self):
        shape = f"|y|^{self.power:g}" if self.power is not None else "g"
        return f"ExponentialFamily(s={self.s:g}, g={shape})"

    @property
    def peak(self):
        return self.normalizer

    @property
    def argmax(self):
        return 0.0

    @property
    def scale(self):
        """Width where ``s * g`` reaches 1/2 (a Gaussian's sigma for g=y**2)."""
        if self.power is not None:
            return (0.5 / self.s) ** (1.0 / self.power)
        lo, hi = 0.0, self.half_width
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if self.s * self.g(mid) < 0.5 else (lo, mid)
        return hi

    def logpdf(self, y):
        return np.log(self.normalizer) - self.s * self.g(np.asarray(y, dtype=float))

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def _inverse_table(self):
        if self._table is None:
            grid = np.linspace(-self.half_width, self.half_width, 200001)
            cdf = integrate.cumulative_trapezoid(self.pdf(grid), grid, initial=0.0)
            cdf /= cdf[-1]
            keep = np.concatenate(([True], np.diff(cdf) > 0))
            self._table = (cdf[keep], grid[keep])
        return self._table

    def from_uniforms(self, u):
        cdf, grid = self._inverse_table()
        return np.interp(u, cdf, grid)

    def sample(self, count, seed, stream=0):
        return self.from_uniforms(rng.uniforms(seed, stream, count))

    def expect(self, fn):
        """``E[fn(Y)]`` by quadrature."""
        val, _ = integrate.quad(
            lambda y: fn(y) * self.pdf(y),
            -self.half_width,
            self.half_width,
            points=[0.0],
            epsabs=1e-12,
            limit=400,
        )
        return val


# --------------------------------------------------------------------------
# sources


@dataclass(frozen=True)
class DiscreteIID:
    """An i.i.d. source with a finite alphabet."""

    pmf: DiscreteDistribution

    @property
    def marginal(self):
        return self.pmf

    def sample_indices(self, count, seed, stream=0):
        return self.pmf.sample_indices(count, seed, stream)

    def sample(self, count, seed, stream=0):
        return self.pmf.sample(count, seed, stream)


@dataclass(frozen=True)
class GaussianIID:
    """An i.i.d. ``N(0, variance)`` source."""

    variance: float

    def __post_init__(self):
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValueError("variance must be finite and positive")

    @property
    def marginal(self):
        return Gaussian(self.variance)

    def sample(self, count, seed, stream=0):
        return self.marginal.sample(count, seed, stream)


@dataclass(frozen=True)
class MarkovChain:
    """A stationary finite-state Markov chain started from its stationary law."""

    states: tuple
    transition: np.ndarray = field(repr=False)

    def __init__(self, states, transition):
        T = np.array(transition, dtype=float)
        states = tuple(states)
        if T.shape != (len(states), len(states)):
            raise ValueError("transition matrix must be square over the states")
        if np.any(T < 0) or np.max(np.abs(T.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition rows must be probability vectors")
        T.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", T)
        object.__setattr__(self, "_stationary", self._solve_stationary(T))

    @classmethod
    def symmetric_binary(cls, flip):
        """Two states ``(0, 1)`` that switch with probability ``flip``."""
        return cls((0, 1), [[1 - flip, flip], [flip, 1 - flip]])

    @staticmethod
    def _solve_stationary(T):
        k = T.shape[0]
        A = np.vstack([T.T - np.eye(k), np.ones(k)])
        b = np.zeros(k + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
        if np.max(np.abs(pi @ T - pi)) > 1e-10:
            raise ValueError("chain has no unique stationary distribution")
        return pi

    @property
    def stationary(self):
        return DiscreteDistribution(self.states, self._stationary)

    @property
    def marginal(self):
        return self.stationary

    def sample_indices(self, count, seed, stream=0):
        u = rng.uniforms(seed, stream, count)
        out = np.empty(count, dtype=np.intp)
        if count == 0:
            return out
        cdfs = np.cumsum(self.transition, axis=1)
        cdfs[:, -1] = 1.0
        state = int(self.stationary.from_uniforms(u[0]))
        out[0] = state
        for t in range(1, count):
            state = min(int(np.searchsorted(cdfs[state], u[t], side="right")), len(cdfs) - 1)
            out[t] = state
        return out

    def sample(self, count, seed, stream=0):
        return [self.states[i] for i in self.sample_indices(count, seed, stream)]


def eval_mass_or_density(law, point):
    """Mass of ``point`` under a discrete law, or density under a continuous one."""
    law = getattr(law, "marginal", law)
    if getattr(law, "is_discrete", False):
        return law.pmf(point)
    point = float(point)
    if not np.isfinite(point):
        raise DomainError("density is only defined on the real line")
    return float(law.pdf(point))


def sample(law, count, seed, stream=0):
    """``count`` draws from a law or source, fully determined by ``(seed, stream)``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return law.sample(count, seed, stream)


# --------------------------------------------------------------------------
# k-block marginals


@dataclass(frozen=True)
class KBlockMarginal:
    """Law of ``(X_1, ..., X_k)``.

    ``joint`` is a :class:`DiscreteDistribution` over k-tuples for discrete
    sources; ``covariance`` is set instead for Gaussian sources.
    """

    k: int
    joint: Optional[DiscreteDistribution] = None
    covariance: Optional[np.ndarray] = None

    def coordinate_marginal(self, i):
        """Marginal law of coordinate ``i`` (discrete blocks only)."""
        masses = {}
        for tup, p in zip(self.joint.support, self.joint.probs):
            masses[tup[i]] = masses.get(tup[i], 0.0) + p
        return masses


def k_block_marginal(source, k):
    """Exact joint law of ``k`` consecutive symbols of a stationary source."""
    if k < 1:
        raise ValueError("block length must be at least 1")
    if isinstance(source, GaussianIID):
        return KBlockMarginal(k, covariance=source.variance * np.eye(k))
    if isinstance(source, DiscreteDistribution):
        source = DiscreteIID(source)
    P = source.marginal
    if len(P) ** k > MAX_BLOCK_SUPPORT:
        raise SizeError(f"|A|^k = {len(P)}^{k} exceeds {MAX_BLOCK_SUPPORT}")
    m = len(P)
    tuples = list(product(range(m), repeat=k))
    if isinstance(source, MarkovChain):
        T = source.transition
        probs = np.array(
            [
                P.probs[t[0]] * np.prod([T[a, b] for a, b in zip(t[:-1], t[1:])])
                for t in tuples
            ]
        )
    elif isinstance(source, DiscreteIID):
        probs = np.array([np.prod(P.probs[list(t)]) for t in tuples])
    else:
        raise TypeError(f"unsupported source {type(source).__name__}")
    probs = probs / probs.sum()
    support = [tuple(P.support[i] for i in t) for t in tuples]
    return KBlockMarginal(k, joint=DiscreteDistribution(support, probs))
