"""Brute-force reference computations for small discrete instances.

Nothing here calls the dual solver in :mod:`mismatch.ratefn`.  The
minimizations are solved in primal form with a conic interior-point solver
(relative-entropy cone), and ``brute_rate_min`` cross-checks itself with a
dense sweep of the Legendre dual.  Size guards raise instead of truncating.
"""

import warnings
from dataclasses import dataclass, field
from itertools import product

import cvxpy as cp
import numpy as np
from scipy.special import logsumexp

from .errors import FeasibilityError, NumericError, SizeError

LN2 = np.log(2.0)
MAX_PAIRS = 64
MAX_WORDS = 10**7
MAX_SOURCE_BLOCKS = 10**6
SWEEP_POINTS = 10**4


def _pairs(P, Q, distortion):
    P = getattr(P, "marginal", P)
    if len(P) * len(Q) > MAX_PAIRS:
        raise SizeError(f"|A||B| = {len(P) * len(Q)} exceeds {MAX_PAIRS}")
    kp, kq = P.probs > 0, Q.probs > 0
    xs = [s for s, k in zip(P.support, kp) if k]
    ys = [s for s, k in zip(Q.support, kq) if k]
    return P.probs[kp], Q.probs[kq], distortion.matrix(xs, ys), kp, kq


def _solve(problem):
    # tight tolerances make Clarabel report "inaccurate" near optimum; the
    # status is still checked by the callers
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    except cp.SolverError:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            problem.solve(solver=cp.SCS, eps=1e-10, max_iters=200_000)
    return problem.status


@dataclass
class BruteRate:
    """Primal minimum of ``H(W || P x Q)`` and the independent dual sweep value."""

    value_bits: float
    plan: np.ndarray = field(repr=False)
    sweep_bits: float = float("nan")

    @property
    def y_marginal(self):
        return self.plan.sum(axis=0)

    def __iter__(self):
        yield self.value_bits
        yield self.plan


def _sweep(p, q, M, D):
    """``max_lam [lam D - Lambda(lam)]`` on a log-spaced grid, then golden refinement."""
    lq = np.log(q)

    def dual(lam):
        lam = np.asarray(lam, dtype=float)[..., None, None]
        return lam[..., 0, 0] * D - logsumexp(lam * M + lq, axis=-1) @ p

    lams = -np.logspace(-8, 4, SWEEP_POINTS)
    vals = dual(lams)
    i = int(np.argmax(vals))
    a, b = lams[min(i + 1, len(lams) - 1)], lams[max(i - 1, 0)]
    g = (np.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    for _ in range(200):
        if dual(c) > dual(d):
            b = d
        else:
            a = c
        c, d = b - g * (b - a), a + g * (b - a)
    return float(max(vals[i], dual(0.5 * (a + b)))) / LN2


def brute_rate_min(P, Q, distortion, D) -> BruteRate:
    """``min H(W || P x Q)`` over joint laws with first marginal ``P`` and ``E_W rho <= D``."""
    p, q, M, kp, kq = _pairs(P, Q, distortion)
    d_min = float(p @ M.min(axis=1))
    d_av = float(p @ M @ q)
    full = np.zeros((kp.size, kq.size))
    if D < d_min - 1e-12:
        raise FeasibilityError(f"D = {D:.6g} below D_min = {d_min:.6g}")
    if D >= d_av:
        full[np.ix_(kp, kq)] = np.outer(p, q)
        return BruteRate(0.0, full, 0.0)

    W = cp.Variable(M.shape, nonneg=True)
    ref = np.outer(p, q)
    cons = [cp.sum(W, axis=1) == p, cp.sum(cp.multiply(W, M)) <= D]
    prob = cp.Problem(cp.Minimize(cp.sum(cp.rel_entr(W, ref))), cons)
    status = _solve(prob)
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        raise FeasibilityError("no joint law meets the distortion constraint")
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise NumericError("conic solver failed", status=status)
    plan = np.clip(W.value, 0.0, None)
    plan *= (p / plan.sum(axis=1))[:, None]
    pos = plan > 0
    value = float(np.sum(plan[pos] * np.log(plan[pos] / ref[pos]))) / LN2
    full[np.ix_(kp, kq)] = plan
    sweep = _sweep(p, q, M, D) if D > d_min else float("nan")
    return BruteRate(value, full, sweep)


def brute_lmi(P, Q_tilde, distortion, D) -> float:
    """``min I(X; Y)`` over couplings of ``P`` and ``Q~`` with ``E rho <= D`` (bits)."""
    p, q, M, _, _ = _pairs(P, Q_tilde, distortion)
    ref = np.outer(p, q)
    if float(np.sum(ref * M)) <= D:
        return 0.0
    W = cp.Variable(M.shape, nonneg=True)
    cons = [
        cp.sum(W, axis=1) == p,
        cp.sum(W, axis=0) == q,
        cp.sum(cp.multiply(W, M)) <= D,
    ]
    prob = cp.Problem(cp.Minimize(cp.sum(cp.rel_entr(W, ref))), cons)
    status = _solve(prob)
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        raise FeasibilityError("no coupling meets the distortion constraint")
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise NumericError("conic solver failed", status=status)
    return max(float(prob.value), 0.0) / LN2


def brute_ball_prob(x_block, Q, distortion, D) -> float:
    """``Q^n(B(x, D))`` by enumerating every reproduction word."""
    n = len(x_block)
    if len(Q) ** n > MAX_WORDS:
        raise SizeError(f"|B|^n = {len(Q)}^{n} exceeds {MAX_WORDS}")
    ys = list(Q.support)
    cost = np.zeros(1)
    mass = np.ones(1)
    for xi in x_block:
        row = distortion.matrix([xi], ys)[0]
        cost = (cost[:, None] + row[None, :]).ravel()
        mass = (mass[:, None] * Q.probs[None, :]).ravel()
    return float(mass[cost / n <= D].sum())


def brute_index_entropy(source, codebook, distortion, D, b) -> float:
    """Exact ``H(N'_n | C_n) / n`` (bits/symbol) for one codebook realization.

    Enumerates every source block with its probability and scans the
    codebook word by word for the first ``D``-match, up to ``floor(2^{nb})``.
    """
    from .distributions import k_block_marginal

    n = codebook.n
    P = getattr(source, "marginal", source)
    if len(P) ** n > MAX_SOURCE_BLOCKS:
        raise SizeError(f"|A|^n = {len(P)}^{n} exceeds {MAX_SOURCE_BLOCKS}")
    blocks = k_block_marginal(source, n).joint
    cap = int(np.floor(2.0 ** (n * b)))
    xs = list(P.support)
    T = distortion.matrix(xs, codebook.law.support)
    X = np.array([[xs.index(s) for s in blk] for blk in blocks.support])
    index = np.full(len(X), cap + 1, dtype=np.int64)
    open_ = np.arange(len(X))
    start, chunk = 1, 256
    while open_.size and start <= cap:
        m = min(chunk, cap - start + 1)
        words = codebook.word_indices(start, m)
        dist = T[X[open_][:, None, :], words[None, :, :]].sum(axis=2) / n
        hit = dist <= D
        found = hit.any(axis=1)
        index[open_[found]] = start + hit[found].argmax(axis=1)
        open_ = open_[~found]
        start += m
    values, inverse = np.unique(index, return_inverse=True)
    pmf = np.bincount(inverse, weights=blocks.probs)
    pmf = pmf[pmf > 0]
    return float(-(pmf * np.log2(pmf)).sum()) / n


def blahut_arimoto_rd(P, distortion, D, repro_support, tol=1e-13, max_iter=100_000) -> float:
    """Rate-distortion function ``R(D)`` of a finite memoryless source (bits).

    Alternating minimization at fixed slope, with bisection on the slope to
    meet ``E rho = D``.
    """
    P = getattr(P, "marginal", P)
    keep = P.probs > 0
    p = P.probs[keep]
    xs = [s for s, k in zip(P.support, keep) if k]
    M = distortion.matrix(xs, list(repro_support))
    d_zero = float(np.min(p @ M))  # distortion of the best constant reproduction
    if D >= d_zero:
        return 0.0
    if D < float(p @ M.min(axis=1)) - 1e-12:
        raise FeasibilityError("D below the minimal achievable distortion")

    def at_slope(beta):
        q = np.full(M.shape[1], 1.0 / M.shape[1])
        for _ in range(max_iter):
            logw = np.log(np.maximum(q, 1e-300))[None, :] - beta * M
            logw -= logsumexp(logw, axis=1, keepdims=True)
            w = np.exp(logw)
            q_new = p @ w
            if np.abs(q_new - q).max() < tol:
                q = q_new
                break
            q = q_new
        pos = w > 0
        joint = p[:, None] * w
        d = float(np.sum(joint * M))
        rate = float(np.sum(joint[pos] * (logw[pos] - np.log(np.maximum(q, 1e-300))[None, :].repeat(len(p), 0)[pos])))
        return d, rate / LN2

    lo, hi = 0.0, 1.0
    while at_slope(hi)[0] > D:
        lo, hi = hi, hi * 2
        if hi > 2.0**30:
            raise NumericError("slope bracket diverged", D=D)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        d, _ = at_slope(mid)
        lo, hi = (mid, hi) if d > D else (lo, mid)
    d_lo, r_lo = at_slope(lo)
    d_hi, r_hi = at_slope(hi)
    if d_lo == d_hi:
        return r_hi
    t = (D - d_hi) / (d_lo - d_hi)
    return (1 - t) * r_hi + t * r_lo


def enumerate_words(Q, n):
    """All ``|B|^n`` words with their ``Q^n`` probabilities (small ``n`` only)."""
    if len(Q) ** n > MAX_WORDS:
        raise SizeError("word enumeration guard exceeded")
    words = list(product(Q.support, repeat=n))
    probs = np.array([np.prod([Q.pmf(s) for s in w]) for w in words])
    return words, probs
