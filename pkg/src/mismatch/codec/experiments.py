"""Monte Carlo experiments built on first-match coding.

Every trial ``t`` is a pure function of ``(seed, t)``: source block ``t`` is
row ``t`` of the source stream and, where codebooks are fresh per trial,
codebook ``t`` has seed ``derive_seed(seed, n, t)``.  Results are joined in
trial order, so thread count never changes the output.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .. import rng
from ..distortion import extremes
from ..distributions import DiscreteDistribution, DiscreteIID, GaussianIID, MarkovChain
from ..errors import DegenerateSampleError, ModelError, RangeError
from ..ratefn import rate_pqd
from .codebook import DEFAULT_BUDGET, MAX_CELLS, Codebook, PatternScanner, _Scorer, first_match, index_cap
from .conditional import LatticeBall
from .elias import elias_length
from .geometric import TruncatedGeometric
from .quantizer import wqc_build

LN2 = math.log(2.0)
SOURCE_STREAM = 1 << 41
CONDITIONAL_STREAM = 1 << 42
DEFAULT_SLACK = 0.5


# --------------------------------------------------------------------------
# source blocks


def sample_blocks(source, n, trials, seed, first=0):
    """Rows ``first .. first+trials-1`` of the source stream as an array.

    Finite-alphabet sources give support indices of the marginal; Gaussian
    sources give real values.
    """
    if isinstance(source, DiscreteDistribution):
        source = DiscreteIID(source)
    U = rng.uniform_rows(seed, SOURCE_STREAM, first, trials, n)
    if isinstance(source, DiscreteIID):
        return source.marginal.from_uniforms(U)
    if isinstance(source, GaussianIID):
        return source.marginal.from_uniforms(U)
    if isinstance(source, MarkovChain):
        cdfs = np.cumsum(source.transition, axis=1)
        cdfs[:, -1] = 1.0
        k = len(source.states)
        out = np.empty(U.shape, dtype=np.intp)
        out[:, 0] = source.stationary.from_uniforms(U[:, 0])
        for i in range(1, n):
            nxt = (cdfs[out[:, i - 1]] <= U[:, i, None]).sum(axis=1)
            out[:, i] = np.minimum(nxt, k - 1)
        return out
    raise TypeError(f"unsupported source {type(source).__name__}")


def block_symbols(source, row):
    """Map one row of :func:`sample_blocks` to source symbols."""
    P = getattr(source, "marginal", source)
    if getattr(P, "is_discrete", False):
        return [P.support[i] for i in row]
    return np.asarray(row, dtype=float)


def default_b(source, law, distortion, D, slack=DEFAULT_SLACK):
    """``R(P, Q, D) + slack``; ``slack`` alone when ``D >= D_av``."""
    P = getattr(source, "marginal", source)
    try:
        return rate_pqd(P, law, distortion, D).rate_bits + slack
    except RangeError:
        if D >= extremes(P, law, distortion).d_av:
            return slack
        raise


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# naive coding


def naive_code_length(trace, wqc, x_block) -> float:
    """``len(elias(N'_n))`` plus the scalar fallback description when truncated."""
    bits = elias_length(trace.index_prime)
    if trace.truncated:
        if wqc is None:
            raise ModelError("a truncated trace needs a fallback quantizer")
        bits += wqc.fallback_bits(x_block)
    return float(bits)


def _auto_wqc(source, distortion, D):
    try:
        return wqc_build(getattr(source, "marginal", source), distortion, D)
    except (ModelError, ValueError):
        return None


def simulate(source, codebook_law, distortion, D, n, trials, seed, b=None, budget=DEFAULT_BUDGET, threads=1, wqc=None):
    """First-match traces with a fresh codebook per trial, naive lengths filled in."""
    b = default_b(source, codebook_law, distortion, D) if b is None else b
    wqc = _auto_wqc(source, distortion, D) if wqc is None else wqc
    X = sample_blocks(source, n, trials, seed)

    def trial(t):
        x = block_symbols(source, X[t])
        cb = Codebook(n, codebook_law, rng.derive_seed(seed, n, t))
        trace = first_match(x, cb, distortion, D, b, budget)
        if wqc is not None or not trace.truncated:
            trace.naive_bits = naive_code_length(trace, wqc, x)
        return trace

    return _map(trial, range(trials), threads)


# --------------------------------------------------------------------------
# index entropy


def entropy_estimates(samples):
    """Plug-in, Miller-Madow and jackknife standard error (bits) of a sample's entropy."""
    _, counts = np.unique(np.asarray(samples), return_counts=True)
    N = counts.sum()
    c = counts.astype(float)
    clogc = c * np.log2(c)
    S = clogc.sum()
    plug = math.log2(N) - S / N
    mm = plug + (len(c) - 1) / (2.0 * N * LN2)
    if N < 2:
        return plug, mm, float("nan"), len(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        cm1 = np.where(c > 1, (c - 1) * np.log2(np.maximum(c - 1, 1)), 0.0)
    loo = math.log2(N - 1) - (S - clogc + cm1) / (N - 1)
    mean = (c @ loo) / N
    var = (N - 1) / N * (c @ (loo - mean) ** 2)
    return float(plug), float(mm), float(math.sqrt(max(var, 0.0))), int(len(c))


@dataclass
class EntropyEstimate:
    """Index entropy for one codebook, per symbol (bits/symbol)."""

    n: int
    trials: int
    codebook_seed: int
    plug_in: float
    miller_madow: float
    stderr: float
    distinct: int
    truncated_fraction: float
    naive_rate: float
    mean_log_index: float
    indices: np.ndarray = field(repr=False, default=None)


def index_entropy_estimate(
    source, codebook: Codebook, distortion, D, b, trials, seed=0, budget=DEFAULT_BUDGET, wqc=None
) -> EntropyEstimate:
    """Estimate ``H(N'_n | C_n) / n`` for one codebook from ``trials`` source blocks."""
    n = codebook.n
    X = sample_blocks(source, n, trials, seed)
    wqc = _auto_wqc(source, distortion, D) if wqc is None else wqc
    cap = index_cap(n, b)
    P = getattr(source, "marginal", source)
    if codebook.is_discrete and getattr(P, "is_discrete", False):
        uniq, inverse = np.unique(X, axis=0, return_inverse=True)
        scanner = PatternScanner(codebook, P.support, distortion)
        idx_u, _ = scanner.match(uniq, D, b, budget)
        fallback = np.zeros(len(uniq))
        trunc_u = idx_u > cap
        if trunc_u.any():
            if wqc is None:
                raise ModelError("truncation occurred but no fallback quantizer exists")
            for j in np.flatnonzero(trunc_u):
                fallback[j] = wqc.fallback_bits(block_symbols(source, uniq[j]))
        inverse = inverse.ravel()
        idx = idx_u[inverse]
        lengths = np.array([elias_length(int(k)) for k in idx_u]) + fallback
        naive = lengths[inverse]
    else:
        traces = [first_match(block_symbols(source, X[t]), codebook, distortion, D, b, budget) for t in range(trials)]
        idx = np.array([tr.index_prime for tr in traces], dtype=np.int64)
        naive = np.array(
            [naive_code_length(tr, wqc, block_symbols(source, X[t])) for t, tr in enumerate(traces)]
        )
    plug, mm, se, distinct = entropy_estimates(idx)
    return EntropyEstimate(
        n=n,
        trials=trials,
        codebook_seed=codebook.seed,
        plug_in=plug / n,
        miller_madow=mm / n,
        stderr=se / n,
        distinct=distinct,
        truncated_fraction=float(np.mean(idx > cap)),
        naive_rate=float(np.mean(naive)) / n,
        mean_log_index=float(np.mean(np.log2(idx.astype(float)))) / n,
        indices=idx,
    )


# --------------------------------------------------------------------------
# favorite type


@dataclass
class FavoriteTypeReport:
    """Average empirical law of the matched word and its distance to the favorite type.

    ``metric`` is ``"tv"`` (finite codebook alphabet: total variation to the
    favorite pmf) or ``"l1_64"`` (continuous: L1 distance between the pooled
    histogram over 64 equal-probability bins of the favorite law and the
    uniform vector).
    """

    n: int
    trials: int
    used: int
    truncated: int
    average: np.ndarray
    target: np.ndarray
    distance: float
    metric: str
    methods: dict = field(default_factory=dict)


def _quantile_edges(law, bins):
    u = np.arange(1, bins) / bins
    if hasattr(law, "from_uniforms"):
        inner = law.from_uniforms(u)
    else:
        grid, dens = law.tabulate(8192, 12.0)
        cdf = cumulative_trapezoid(dens, grid, initial=0.0)
        cdf /= cdf[-1]
        inner = np.interp(u, cdf, grid)
    return np.concatenate([[-np.inf], inner, [np.inf]])


def favorite_type(
    source,
    codebook_law,
    distortion,
    D,
    n,
    trials,
    seed,
    b=None,
    method="auto",
    budget=DEFAULT_BUDGET,
    threads=1,
    scan_limit=2**16,
    bins=64,
) -> FavoriteTypeReport:
    """Average the matched word's empirical law over trials with fresh codebooks.

    ``method`` selects how the matched word is obtained: ``"scan"`` searches
    the codebook; ``"conditional"`` draws the index from its geometric law
    and the word from ``Q^n`` conditioned on the ball (exact in distribution,
    finite alphabets with lattice costs); ``"auto"`` scans when the expected
    search is at most ``scan_limit`` words and conditions otherwise.
    """
    if method not in ("auto", "scan", "conditional"):
        raise ValueError(f"unknown method {method!r}")
    P = getattr(source, "marginal", source)
    sol = rate_pqd(P, codebook_law, distortion, D)
    b = sol.rate_bits + DEFAULT_SLACK if b is None else b
    cap = index_cap(n, b)
    X = sample_blocks(source, n, trials, seed)
    discrete = bool(getattr(codebook_law, "is_discrete", False))
    if discrete:
        target = np.array([sol.q_star.pmf(s) for s in codebook_law.support])
        lattice = getattr(P, "is_discrete", False)
        T = distortion.matrix(list(P.support), codebook_law.support) if lattice else None
    else:
        edges = _quantile_edges(sol.q_star, bins)
        target = np.full(bins, 1.0 / bins)
        lattice = False
    if method == "conditional" and not lattice:
        raise ModelError("conditional sampling needs finite alphabets")

    def trial(t):
        cb_seed = rng.derive_seed(seed, n, t)
        if lattice and method != "scan":
            try:
                ball = LatticeBall(T[X[t]], codebook_law.probs, D)
            except ModelError:
                if method == "conditional":
                    raise
                ball = None
            if ball is not None and (method == "conditional" or ball.probability * scan_limit < 1.0):
                u = rng.uniforms(cb_seed, CONDITIONAL_STREAM, n + 1)
                if ball.probability <= 0.0:
                    return None, "conditional"
                N = TruncatedGeometric(min(ball.probability, 1.0), cap).sample(u[0])
                if N > cap:
                    return None, "conditional"
                w = ball.sample(u[1:])
                return np.bincount(w, minlength=len(codebook_law)) / n, "conditional"
        trace = first_match(block_symbols(source, X[t]), Codebook(n, codebook_law, cb_seed), distortion, D, b, budget)
        if trace.truncated:
            return None, "scan"
        if discrete:
            return trace.empirical, "scan"
        return np.histogram(trace.matched_word, bins=edges)[0] / n, "scan"

    results = _map(trial, range(trials), threads)
    kept = [r for r, _ in results if r is not None]
    methods = {}
    for _, m in results:
        methods[m] = methods.get(m, 0) + 1
    if not kept:
        raise DegenerateSampleError("every trial was truncated")
    avg = np.mean(kept, axis=0)
    if discrete:
        dist, metric = 0.5 * float(np.abs(avg - target).sum()), "tv"
    else:
        dist, metric = float(np.abs(avg - target).sum()), f"l1_{bins}"
    return FavoriteTypeReport(n, trials, len(kept), trials - len(kept), avg, target, dist, metric, methods)


# --------------------------------------------------------------------------
# ball probability


@dataclass
class BallEstimate:
    """Estimate of ``-(1/n) log2 Q^n(B(x, D))``.

    With zero hits, ``exponent`` is a one-sided 95% lower confidence bound
    and ``lower_bound`` is set.
    """

    n: int
    exponent: float
    stderr: float
    hits: int
    trials: int
    probability: float
    lower_bound: bool = False
    exact: bool = False


def ball_log_prob(x_block, codebook_law, distortion, D, trials=10**5, seed=0, exact=False) -> BallEstimate:
    """Exponent of the ball probability by Monte Carlo or exhaustive enumeration."""
    n = len(x_block)
    if exact:
        from ..oracle import brute_ball_prob

        p = brute_ball_prob(x_block, codebook_law, distortion, D)
        expo = -math.log2(p) / n if p > 0 else math.inf
        return BallEstimate(n, expo, 0.0, 0, 0, p, exact=True)
    cb = Codebook(n, codebook_law, seed)
    scorer = _Scorer(x_block, cb, distortion)
    hits, start = 0, 1
    chunk = max(1, MAX_CELLS // n)
    while start <= trials:
        m = min(chunk, trials - start + 1)
        d, _ = scorer(start, m)
        hits += int(np.count_nonzero(d <= D))
        start += m
    if hits == 0:
        p_hi = -math.expm1(math.log(0.05) / trials)
        return BallEstimate(n, -math.log2(p_hi) / n, float("nan"), 0, trials, 0.0, lower_bound=True)
    p = hits / trials
    se = math.sqrt((1.0 - p) / (trials * p)) / (n * LN2)
    return BallEstimate(n, -math.log2(p) / n, se, hits, trials, p)
