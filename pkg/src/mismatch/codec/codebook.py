"""Lazy memoryless codebooks and first-match search.

Word ``i`` (1-based) is generated from counter row ``i - 1`` of the
codebook's Philox stream, so any word can be regenerated on its own.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import rng
from ..distortion import BOUNDARY_EPS
from ..errors import DomainError, ResourceError, ShapeError
from .elias import elias_length

CODEBOOK_STREAM = 1 << 40
DEFAULT_BUDGET = 2**26
MAX_CHUNK = 1 << 15
MAX_CELLS = 1 << 22  # words * block length evaluated per chunk


def index_cap(n: int, b: float) -> int:
    """``floor(2^{n b})`` as an exact integer."""
    if not b > 0:
        raise DomainError("truncation exponent b must be positive")
    e = n * b
    if e < 1000:
        return int(math.floor(2.0**e))
    return 1 << int(math.floor(e))


class Codebook:
    """An infinite i.i.d. codebook ``Y(1), Y(2), ...`` with words drawn from ``law^n``.

    :param n: block length
    :param law: discrete pmf or continuous law exposing ``from_uniforms``
    :param seed: 64-bit seed; word ``i`` depends only on ``(seed, i)``
    """

    def __init__(self, n: int, law, seed: int, stream: int = CODEBOOK_STREAM):
        if n < 1:
            raise DomainError("block length must be positive")
        self.n = int(n)
        self.law = law
        self.seed = int(seed)
        self.stream = int(stream)
        self.is_discrete = bool(getattr(law, "is_discrete", False))

    def __repr__(self):
        return f"Codebook(n={self.n}, law={self.law!r}, seed={self.seed})"

    def _uniforms(self, start, count):
        if start < 1:
            raise DomainError("codeword indices start at 1")
        return rng.uniform_rows(self.seed, self.stream, start - 1, count, self.n)

    def word_indices(self, start: int, count: int) -> np.ndarray:
        """Support indices of words ``start .. start+count-1`` (discrete laws)."""
        if not self.is_discrete:
            raise TypeError("word indices exist only for discrete codebook laws")
        return self.law.from_uniforms(self._uniforms(start, count))

    def words(self, start: int, count: int) -> np.ndarray:
        """Words ``start .. start+count-1`` as rows of reproduction values."""
        if self.is_discrete:
            idx = self.word_indices(start, count)
            return np.asarray(self.law.support, dtype=object if _symbolic(self.law) else float)[idx]
        return self.law.from_uniforms(self._uniforms(start, count))

    def word(self, i: int) -> np.ndarray:
        return self.words(i, 1)[0]


def _symbolic(law):
    return not all(isinstance(s, (int, float, np.integer, np.floating)) for s in law.support)


class _Scorer:
    """``rho_n(x, Y(i))`` for a run of consecutive codewords."""

    def __init__(self, x_block, codebook: Codebook, distortion):
        self.codebook = codebook
        self.n = codebook.n
        if codebook.is_discrete:
            # row i holds rho(x_i, b) for every reproduction symbol b
            self.costs = distortion.matrix(list(x_block), codebook.law.support)
            self.rows = np.arange(self.n)
        else:
            self.x = np.asarray(x_block, dtype=float)
            self.distortion = distortion

    def __call__(self, start, count):
        if self.codebook.is_discrete:
            w = self.codebook.word_indices(start, count)
            return self.costs[self.rows, w].sum(axis=1) / self.n, w
        w = self.codebook.words(start, count)
        return self.distortion(self.x[None, :], w).sum(axis=1) / self.n, w


@dataclass
class MatchTrace:
    """Outcome of one first-match search.

    ``index`` is ``N_n`` (``None`` when truncated); ``index_prime`` is the
    transmitted index ``N'_n``, equal to ``cap + 1`` on truncation.
    """

    n: int
    index: Optional[int]
    truncated: bool
    b: float
    cap: int
    rho: Optional[float] = None
    boundary_flag: bool = False
    empirical: Optional[np.ndarray] = field(default=None, repr=False)
    matched_word: Optional[np.ndarray] = field(default=None, repr=False)
    naive_bits: Optional[float] = None
    seed: Optional[int] = None

    @property
    def index_prime(self) -> int:
        return self.cap + 1 if self.truncated else int(self.index)

    @property
    def log_index_rate(self) -> float:
        """``(1/n) log2 N'_n`` in bits per symbol."""
        return math.log2(self.index_prime) / self.n

    @property
    def elias_bits(self) -> int:
        return elias_length(self.index_prime)


def first_match(x_block, codebook: Codebook, distortion, D, b, budget=DEFAULT_BUDGET, audit=False):
    """Scan ``Y(1), Y(2), ...`` for the first word with ``rho_n(x, Y(i)) <= D``.

    The scan stops at the cap ``floor(2^{nb})``, giving a truncated trace.

    :raises ResourceError: if ``budget`` words are compared before reaching
        either a match or the cap
    """
    n = codebook.n
    if len(x_block) != n:
        raise ShapeError(f"block of length {len(x_block)} for a codebook with n={n}")
    cap = index_cap(n, b)
    limit = min(cap, int(budget))
    scorer = _Scorer(x_block, codebook, distortion)
    start, chunk = 1, 64
    near = False
    while start <= limit:
        m = min(chunk, limit - start + 1)
        d, w = scorer(start, m)
        hits = np.flatnonzero(d <= D)
        stop = hits[0] + 1 if hits.size else m
        near = near or bool(np.any(np.abs(d[:stop] - D) <= BOUNDARY_EPS))
        if hits.size:
            j = int(hits[0])
            trace = MatchTrace(
                n, start + j, False, b, cap, rho=float(d[j]), boundary_flag=near, seed=codebook.seed
            )
            if codebook.is_discrete:
                trace.empirical = np.bincount(w[j], minlength=len(codebook.law)) / n
                trace.matched_word = w[j]
            else:
                trace.matched_word = w[j]
            if audit:
                audit_trace(x_block, codebook, distortion, D, trace)
            return trace
        start += m
        chunk = min(2 * chunk, max(1, MAX_CELLS // n), MAX_CHUNK)
    if cap > limit:
        raise ResourceError(f"no match within the budget of {budget} words (cap {cap})")
    return MatchTrace(n, None, True, b, cap, boundary_flag=near, seed=codebook.seed)


def audit_trace(x_block, codebook, distortion, D, trace, max_cells=10**7):
    """Re-check a trace word by word with :func:`mismatch.distortion.rho_n`."""
    from ..distortion import rho_n

    if trace.truncated:
        last = trace.cap
    else:
        last = trace.index
    if codebook.n * last > max_cells:
        raise ResourceError("trace too long for a full audit")
    words = codebook.words(1, last)
    for i, w in enumerate(words, start=1):
        inside = rho_n(x_block, w, distortion) <= D
        if trace.truncated or i < trace.index:
            if inside:
                raise AssertionError(f"word {i} is in the ball before the reported match")
        elif not inside:
            raise AssertionError(f"reported match {i} is outside the ball")
    return True


class PatternScanner:
    """First-match indices for many source blocks against one discrete codebook.

    Every codeword is reduced to its pattern code in ``range(|B|^n)``.  The
    scan records the first index of each pattern; a block's match index is
    the smallest first index over the patterns inside its ball.  Scanning
    stops once every block is resolved or the cap is reached.
    """

    MAX_PATTERNS = 1 << 22

    def __init__(self, codebook: Codebook, source_symbols, distortion):
        if not codebook.is_discrete:
            raise TypeError("pattern scanning needs a discrete codebook law")
        self.codebook = codebook
        self.n = codebook.n
        self.k = len(codebook.law)
        self.npat = self.k**self.n
        if self.npat > self.MAX_PATTERNS:
            raise ResourceError(f"|B|^n = {self.npat} patterns exceed {self.MAX_PATTERNS}")
        self.T = distortion.matrix(list(source_symbols), codebook.law.support)
        self.powers = self.k ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        digits = (np.arange(self.npat)[:, None] // self.powers[None, :]) % self.k
        self.digits = digits
        self.first = np.full(self.npat, np.iinfo(np.int64).max, dtype=np.int64)
        self.scanned = 0

    def _ball(self, X):
        """Boolean ``(len(X), |B|^n)`` ball membership for source index rows ``X``."""
        cost = np.zeros((X.shape[0], self.npat))
        for i in range(self.n):
            cost += self.T[X[:, i]][:, self.digits[:, i]]
        return cost / self.n

    def _advance(self, upto):
        chunk = max(1, min(MAX_CELLS // self.n, 1 << 16))
        while self.scanned < upto:
            m = min(chunk, upto - self.scanned)
            w = self.codebook.word_indices(self.scanned + 1, m)
            codes = w @ self.powers
            uniq, pos = np.unique(codes, return_index=True)
            fresh = self.first[uniq] == np.iinfo(np.int64).max
            self.first[uniq[fresh]] = self.scanned + 1 + pos[fresh]
            self.scanned += m

    def match(self, X, D, b, budget=DEFAULT_BUDGET, rows_per_block=256):
        """``N'_n`` for each row of source indices ``X``, with boundary flags."""
        X = np.asarray(X, dtype=np.intp)
        cap = index_cap(self.n, b)
        limit = min(cap, int(budget))
        out = np.full(X.shape[0], -1, dtype=np.int64)
        flags = np.zeros(X.shape[0], dtype=bool)
        balls = []
        for lo in range(0, X.shape[0], rows_per_block):
            d = self._ball(X[lo : lo + rows_per_block])
            balls.append(d <= D)
            flags[lo : lo + rows_per_block] = np.any(np.abs(d - D) <= BOUNDARY_EPS, axis=1)
        ball = np.vstack(balls) if balls else np.zeros((0, self.npat), dtype=bool)
        never = np.iinfo(np.int64).max
        target = min(limit, 1 << 10)
        while True:
            self._advance(target)
            open_ = np.flatnonzero(out < 0)
            if open_.size == 0:
                break
            seen = np.concatenate(
                [
                    np.where(ball[rows], self.first[None, :], never).min(axis=1)
                    for rows in np.array_split(open_, max(1, open_.size // rows_per_block))
                ]
            )
            ok = seen <= target
            out[open_[ok]] = seen[ok]
            if target >= limit:
                break
            target = min(2 * target, limit)
        rest = out < 0
        if rest.any():
            if cap > limit:
                raise ResourceError(f"{int(rest.sum())} blocks unresolved within the budget of {budget} words")
            out[rest] = cap + 1
        return out, flags
