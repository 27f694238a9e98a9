"""Relative entropy and the output-constrained rate-distortion function.

``lmi_direct`` minimizes ``I(X; Y)`` over couplings of fixed marginals
``P`` and ``Q~`` with ``E rho <= D``.  With both marginals fixed,
``I(X; Y) = H(W || P x Q~)``, so for a multiplier ``beta`` the Lagrangian
minimizer is the entropic transport plan ``W ~ P Q~ exp(-beta rho)``
rescaled to the marginals.  Alternating marginal projections (Sinkhorn)
find it; an outer bracketed search tunes ``beta`` until ``E_W rho = D``.
"""

import numpy as np
from scipy import integrate, optimize
from scipy.special import logsumexp

from ..distributions import DiscreteDistribution
from ..errors import FeasibilityError, NumericError, SizeError

LN2 = np.log(2.0)
MAX_PAIRS = 10**6


def relative_entropy(W, V) -> float:
    """``H(W || V)`` in bits; ``inf`` when ``W`` is not absolutely continuous wrt ``V``.

    Accepts two :class:`DiscreteDistribution` objects on the same support,
    two probability arrays, or two continuous laws exposing ``logpdf``.
    """
    if isinstance(W, DiscreteDistribution) and isinstance(V, DiscreteDistribution):
        if set(W.support) != set(V.support):
            raise ValueError("pmfs must share a support")
        v = np.array([V.pmf(s) for s in W.support])
        w = W.probs
    elif not hasattr(W, "logpdf"):
        w = np.asarray(W, dtype=float)
        v = np.asarray(V, dtype=float)
        if w.shape != v.shape:
            raise ValueError("pmf arrays must have the same shape")
    else:
        return _continuous_kl(W, V)
    pos = w > 0
    if np.any(v[pos] <= 0):
        return float("inf")
    return float(np.sum(w[pos] * np.log2(w[pos] / v[pos])))


def _continuous_kl(W, V):
    center = getattr(W, "mean", 0.0)
    scale = getattr(W, "scale", 1.0)
    lo, hi = center - 40 * scale, center + 40 * scale

    def integrand(y):
        lw = W.logpdf(y)
        return float(np.exp(lw) * (lw - V.logpdf(y)))

    val, _ = integrate.quad(integrand, lo, hi, points=[center], epsabs=1e-13, limit=500)
    if not np.isfinite(val):
        return float("inf")
    return val / LN2


def mutual_information_bits(W):
    """``I(X; Y)`` of a joint pmf matrix."""
    W = np.asarray(W, dtype=float)
    px = W.sum(axis=1, keepdims=True)
    py = W.sum(axis=0, keepdims=True)
    pos = W > 0
    return float(np.sum(W[pos] * np.log2(W[pos] / (px @ py)[pos])))


def min_coupling_distortion(p, q, M):
    """Smallest ``E rho`` over couplings of ``p`` and ``q`` (a transport LP)."""
    nx, ny = M.shape
    A_eq = np.zeros((nx + ny, nx * ny))
    for i in range(nx):
        A_eq[i, i * ny : (i + 1) * ny] = 1.0
    for j in range(ny):
        A_eq[nx + j, j::ny] = 1.0
    res = optimize.linprog(
        M.ravel(), A_eq=A_eq, b_eq=np.concatenate([p, q]), bounds=(0, None), method="highs"
    )
    if not res.success:
        raise NumericError("transport LP failed", status=res.status, message=res.message)
    return float(res.fun)


class _Sinkhorn:
    """Log-domain scaling of ``p q exp(-beta M)`` to marginals ``p`` and ``q``."""

    def __init__(self, p, q, M, tol=1e-14, max_iter=200_000):
        self.lp, self.lq, self.M = np.log(p), np.log(q), M
        self.p, self.q = p, q
        self.tol, self.max_iter = tol, max_iter
        self.a = np.zeros(len(p))
        self.b = np.zeros(len(q))

    def plan(self, beta):
        K = -beta * self.M
        a, b = self.a, self.b
        for it in range(self.max_iter):
            a = -logsumexp(K + (self.lq + b)[None, :], axis=1)
            b = -logsumexp(K + (self.lp + a)[:, None], axis=0)
            logW = K + (self.lp + a)[:, None] + (self.lq + b)[None, :]
            err = np.abs(np.exp(logsumexp(logW, axis=1)) - self.p).max()
            if err < self.tol:
                break
        else:
            raise NumericError("Sinkhorn did not converge", beta=beta, marginal_error=err)
        self.a, self.b = a, b
        W = np.exp(logW)
        d = float(np.sum(W * self.M))
        # I(X;Y) = E_W[a + b - beta M] since log(W / pq) = a + b - beta M
        info = float(self.p @ a + self.q @ b - beta * d)
        return W, d, info


def lmi_direct(P, Q_tilde, distortion, D, return_plan=False):
    """``I_m(P || Q~, D)`` in bits for finite alphabets.

    :raises FeasibilityError: if no coupling has ``E rho <= D``
    """
    P = getattr(P, "marginal", P)
    if len(P) * len(Q_tilde) > MAX_PAIRS:
        raise SizeError("alphabet product exceeds the enumeration guard")
    kp, kq = P.probs > 0, Q_tilde.probs > 0
    p, q = P.probs[kp], Q_tilde.probs[kq]
    xs = [s for s, k in zip(P.support, kp) if k]
    ys = [s for s, k in zip(Q_tilde.support, kq) if k]
    M = distortion.matrix(xs, ys)

    d_ind = float(p @ M @ q)
    if D >= d_ind:
        plan = np.outer(p, q)
        return (0.0, plan) if return_plan else 0.0
    d_ot = min_coupling_distortion(p, q, M)
    if D < d_ot - 1e-12:
        raise FeasibilityError(f"D = {D:.6g} is below the minimal coupling distortion {d_ot:.6g}")
    if D <= d_ot + 1e-12:
        raise NumericError("D at the transport boundary; the multiplier diverges", d_ot=d_ot)

    sk = _Sinkhorn(p, q, M)
    f = lambda beta: sk.plan(beta)[1] - D  # noqa: E731
    lo, hi = 0.0, 1.0
    while f(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 2.0**40:
            raise NumericError("multiplier bracket diverged", D=D, d_ot=d_ot)
    prev = None
    # bisect to a bracket, then polish with Brent; stop when the objective settles
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        W, d, info = sk.plan(mid)
        if d > D:
            lo = mid
        else:
            hi = mid
        if prev is not None and abs(info - prev) / LN2 <= 1e-9 and hi - lo < 1e-6 * hi:
            break
        prev = info
    beta = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15) if f(lo) * f(hi) < 0 else hi
    W, d, info = sk.plan(beta)
    value = max(info, 0.0) / LN2
    return (value, W) if return_plan else value
