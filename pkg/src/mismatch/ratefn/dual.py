"""Dual computation of the mismatched rate function.

For a source marginal ``P``, codebook law ``Q`` and distortion ``rho``::

    Lambda(lam) = E_P[ ln E_Q exp(lam * rho(X, Y)) ],     lam <= 0
    R(P, Q, D)  = sup_{lam <= 0} [lam * D - Lambda(lam)]

The supremum is attained at the unique ``lam*`` with ``Lambda'(lam*) = D``.
The optimal joint law tilts ``P x Q`` by ``exp(lam* rho) / E_Q[...]`` and its
``Y``-marginal is the favorite type ``Q*``.

Everything here is computed in nats; :class:`RateSolution` reports bits.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy import optimize
from scipy.integrate import trapezoid
from scipy.special import logsumexp

from ..distortion import DistortionExtremes, PowerR, extremes
from ..distributions import DiscreteDistribution, ExponentialFamily, Gaussian
from ..errors import DomainError, NumericError, RangeError

LN2 = np.log(2.0)
GAUSS_HERMITE_NODES = 96
POINTS_PER_WIDTH = 12
MAX_GRID = 400_000
_CHUNK = 4_000_000
NODE_GROUPS = 1


def _outer_nodes(P, n_nodes=GAUSS_HERMITE_NODES):
    """Quadrature nodes and weights for expectations under ``P``."""
    if getattr(P, "is_discrete", False):
        keep = P.probs > 0
        return P.values()[keep], P.probs[keep]
    if isinstance(P, Gaussian):
        t, w = hermegauss(n_nodes)
        return P.mean + P.scale * t, w / np.sqrt(2 * np.pi)
    raise TypeError(f"no quadrature rule for source law {P!r}")


def _support_range(Q):
    if isinstance(Q, Gaussian):
        return Q.mean - 40 * Q.scale, Q.mean + 40 * Q.scale
    if isinstance(Q, ExponentialFamily):
        return -Q.half_width, Q.half_width
    raise TypeError(f"no integration range for codebook law {Q!r}")


class LogMgf:
    """``Lambda(lam)`` and ``Lambda'(lam)`` for a ``(P, Q, rho)`` triple.

    :param method: ``"auto"`` uses the closed form for Gaussian ``P`` and
        ``Q`` under squared error and quadrature otherwise; ``"quadrature"``
        forces the generic route.
    """

    def __init__(self, P, Q, distortion, method="auto", n_nodes=GAUSS_HERMITE_NODES):
        P = getattr(P, "marginal", P)
        self.P, self.Q, self.distortion = P, Q, distortion
        self.extremes: DistortionExtremes = extremes(P, Q, distortion)
        self.p_discrete = getattr(P, "is_discrete", False)
        self.q_discrete = getattr(Q, "is_discrete", False)
        closed = (
            isinstance(P, Gaussian)
            and isinstance(Q, Gaussian)
            and isinstance(distortion, PowerR)
            and distortion.power == 2.0
        )
        if method not in ("auto", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        self.method = "closed" if (closed and method == "auto") else "quadrature"
        self.x_nodes, self.x_weights = _outer_nodes(P, n_nodes)
        if self.q_discrete:
            keep = Q.probs > 0
            self.y_support = [s for s, k in zip(Q.support, keep) if k]
            self.log_q = np.log(Q.probs[keep])
            if self.p_discrete:
                Ps = [s for s, p in zip(P.support, P.probs) if p > 0]
                self.M = distortion.matrix(Ps, self.y_support)
            else:
                self.M = distortion.matrix(self.x_nodes, self.y_support)
        elif not isinstance(distortion, PowerR):
            raise TypeError("continuous codebooks need a difference distortion")

    # -- evaluation --------------------------------------------------------

    def _check(self, lam):
        if lam > 0:
            raise DomainError(f"Lambda is only evaluated for lam <= 0, got {lam}")

    def __call__(self, lam):
        self._check(lam)
        if self.method == "closed":
            return self._closed(lam)[0]
        logz, _ = self.inner(lam)
        return float(self.x_weights @ logz)

    def derivative(self, lam):
        self._check(lam)
        if self.method == "closed":
            return self._closed(lam)[1]
        _, mean_rho = self.inner(lam)
        return float(self.x_weights @ mean_rho)

    def _closed(self, lam):
        P, Q = self.P, self.Q
        tau2 = Q.variance
        s = P.variance + (P.mean - Q.mean) ** 2
        u = 1.0 - 2.0 * lam * tau2
        return -0.5 * np.log(u) + lam * s / u, tau2 / u + s / u**2

    def inner(self, lam):
        """Per-node ``ln E_Q e^{lam rho(x, Y)}`` and tilted mean distortion."""
        if self.q_discrete:
            a = lam * self.M + self.log_q[None, :]
            logz = logsumexp(a, axis=1)
            w = np.exp(a - logz[:, None])
            return logz, (w * self.M).sum(axis=1)
        out_z = np.empty(self.x_nodes.size)
        out_m = np.empty(self.x_nodes.size)
        # nodes are sorted, so neighbouring groups share narrow offset windows
        for g in np.array_split(np.arange(self.x_nodes.size), NODE_GROUPS):
            if g.size == 0:
                continue
            z, rho_z, h = self._z_grid(lam, self.x_nodes[g])
            step = max(1, _CHUNK // max(z.size, 1))
            for lo in range(0, g.size, step):
                idx = g[lo : lo + step]
                a = self.Q.logpdf(self.x_nodes[idx, None] + z[None, :]) + lam * rho_z[None, :]
                top = a.max(axis=1, keepdims=True)
                np.subtract(a, top, out=a)
                np.exp(a, out=a)
                s = a.sum(axis=1)
                out_z[idx] = top[:, 0] + np.log(s) + np.log(h)
                out_m[idx] = (a @ rho_z) / s
        return out_z, out_m

    def _z_grid(self, lam, xs=None):
        """Offsets ``z = y - x`` covering the integrands of nodes ``xs``, with 0 on the grid."""
        rho = self.distortion
        lo_q, hi_q = _support_range(self.Q)
        xs = self.x_nodes if xs is None else xs
        z_lo, z_hi = lo_q - xs.max(), hi_q - xs.min()
        width = rho.kernel_width(lam)
        scale_q = self.Q.scale
        if np.isfinite(width):
            slack = float(np.max(np.log(self.Q.peak) - self.Q.logpdf(xs)))
            cut = ((800.0 + min(slack, 1e4)) / abs(lam)) ** (1.0 / rho.power)
            z_lo, z_hi = max(z_lo, -cut), min(z_hi, cut)
        h = min(width, scale_q) / POINTS_PER_WIDTH
        j_lo, j_hi = int(np.floor(z_lo / h)), int(np.ceil(z_hi / h))
        if j_hi - j_lo + 1 > MAX_GRID:
            raise NumericError(
                "quadrature grid too large", lam=lam, spacing=h, points=j_hi - j_lo + 1
            )
        z = h * np.arange(j_lo, j_hi + 1)
        return z, rho.difference(z), h


# --------------------------------------------------------------------------
# root finding


def solve_lambda_star(log_mgf: LogMgf, D: float) -> float:
    """The unique ``lam* < 0`` with ``Lambda'(lam*) = D``.

    The bracket starts at ``[-1, -1]`` and its ends are doubled/halved (up to
    ``2**60``) until ``Lambda' - D`` changes sign; Brent's method finishes.
    """
    ext = log_mgf.extremes
    if not ext.contains(D):
        raise RangeError(
            f"D = {D:.6g} is outside the open interval ({ext.d_min:.6g}, {ext.d_av:.6g})"
        )
    f = lambda lam: log_mgf.derivative(lam) - D  # noqa: E731
    f_one = f(-1.0)
    if f_one == 0:
        return -1.0
    hi, f_hi = -1.0, f_one
    while f_hi <= 0:
        hi *= 0.5
        if hi > -(2.0**-60):
            raise NumericError("no sign change near 0", D=D, d_av=ext.d_av)
        f_hi = f(hi)
    lo, f_lo = -1.0, f_one
    while f_lo >= 0:
        lo *= 2.0
        if lo < -(2.0**60):
            raise NumericError("no sign change toward -inf", D=D, d_min=ext.d_min)
        f_lo = f(lo)
    lam = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    resid = abs(f(lam))
    if resid > 1e-10 * ext.d_av:
        raise NumericError("root residual above tolerance", lam=lam, residual=resid, D=D)
    return float(lam)


# --------------------------------------------------------------------------
# tilted channel and favorite type


class TiltedChannel:
    """``W*(dy|x) = Q(dy) e^{lam rho(x, y)} / E_Q[e^{lam rho(x, Y)}]``."""

    def __init__(self, log_mgf: LogMgf, lam: float):
        self.log_mgf = log_mgf
        self.lam = float(lam)
        self.log_normalizers, self.mean_distortion = log_mgf.inner(lam)

    @property
    def normalizers(self):
        return np.exp(self.log_normalizers)

    def distortion(self):
        """``E_{W*}[rho(X, Y)]``."""
        return float(self.log_mgf.x_weights @ self.mean_distortion)

    def conditional(self):
        """Row-stochastic matrix ``W*(y|x)`` (discrete codebooks only)."""
        lm = self.log_mgf
        a = self.lam * lm.M + lm.log_q[None, :] - self.log_normalizers[:, None]
        return np.exp(a)

    def log_ratio(self, y):
        """``ln dQ*/dQ (y) = ln E_P[e^{lam rho(X, y)} / Z(X)]`` (continuous Q)."""
        lm = self.log_mgf
        y = np.asarray(y, dtype=float)
        a = (
            self.lam * lm.distortion(lm.x_nodes[:, None], y[None, :])
            - self.log_normalizers[:, None]
            + np.log(lm.x_weights)[:, None]
        )
        return logsumexp(a, axis=0)


@dataclass
class TiltedDensity:
    """Density of the favorite type when the codebook law is continuous."""

    channel: TiltedChannel
    mean: float
    variance: float
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    is_discrete = False

    def logpdf(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty(y.shape)
        step = max(1, _CHUNK // self.channel.log_mgf.x_nodes.size)
        flat = y.ravel()
        res = out.ravel()
        for i in range(0, flat.size, step):
            yy = flat[i : i + step]
            res[i : i + step] = self.channel.log_mgf.Q.logpdf(yy) + self.channel.log_ratio(yy)
        return res.reshape(y.shape)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    @property
    def scale(self):
        return float(np.sqrt(self.variance))

    def tabulate(self, points=2048, width=8.0):
        grid = np.linspace(self.mean - width * self.scale, self.mean + width * self.scale, points)
        return grid, self.pdf(grid)


def _continuous_favorite(channel: TiltedChannel):
    """Moments, tabulation and ``H(Q*||Q)`` (nats) for a continuous codebook."""
    lm = channel.log_mgf
    z, rho_z, h = lm._z_grid(channel.lam)
    w_x = lm.x_weights
    m1 = np.empty(lm.x_nodes.size)
    m2 = np.empty(lm.x_nodes.size)
    step = max(1, _CHUNK // max(z.size, 1))
    for i in range(0, lm.x_nodes.size, step):
        x = lm.x_nodes[i : i + step, None]
        a = lm.Q.logpdf(x + z[None, :]) + channel.lam * rho_z[None, :]
        w = np.exp(a - logsumexp(a, axis=1, keepdims=True))
        ey = x[:, 0] + w @ z
        m1[i : i + step] = ey
        m2[i : i + step] = w @ (z * z) - (w @ z) ** 2 + ey**2
    mean = float(w_x @ m1)
    var = float(w_x @ m2 - mean**2)
    sd = np.sqrt(max(var, 1e-300))

    width = lm.distortion.kernel_width(channel.lam)
    hy = min(width, lm.Q.scale, sd) / POINTS_PER_WIDTH
    lo = min(mean - 14 * sd, lm.x_nodes.min() - 14 * min(width, sd))
    hi = max(mean + 14 * sd, lm.x_nodes.max() + 14 * min(width, sd))
    q_lo, q_hi = _support_range(lm.Q)
    lo, hi = max(lo, q_lo), min(hi, q_hi)
    n = int(np.ceil((hi - lo) / hy)) + 1
    if n > MAX_GRID:
        raise NumericError("favorite-type grid too large", points=n, spacing=hy)
    y = np.linspace(lo, hi, n)
    hy = y[1] - y[0]
    dens = TiltedDensity(channel, mean, var, y, np.empty(0))
    log_r = np.concatenate(
        [channel.log_ratio(y[i : i + 20000]) for i in range(0, y.size, 20000)]
    )
    f = np.exp(lm.Q.logpdf(y) + log_r)
    mass = float(trapezoid(f, dx=hy))
    gap = float(trapezoid(f * log_r, dx=hy))
    grid, values = dens.tabulate()
    dens.grid, dens.values = grid, values
    return dens, gap, mass


# --------------------------------------------------------------------------
# the rate function


@dataclass
class RateSolution:
    """Everything the dual solver learns about one ``(P, Q, rho, D)``.

    Rates are in bits per symbol; ``lambda_star`` is per distortion unit
    (natural-log convention).
    """

    D: float
    lambda_star: float
    rate_bits: float
    lmi_bits: float
    gap_bits: float
    q_star: object
    extremes: DistortionExtremes
    log_mgf_value: float = float("nan")
    channel: Optional[TiltedChannel] = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def rate_nats(self):
        return self.rate_bits * LN2


def rate_pqd(P, Q, distortion, D, method="auto") -> RateSolution:
    """``R(P, Q, D)`` with its favorite type and decomposition.

    ``rate = lmi + gap`` where ``gap = H(Q*||Q)`` and ``lmi`` is the lower
    mutual information at ``Q*``.
    """
    lm = LogMgf(P, Q, distortion, method=method)
    lam = solve_lambda_star(lm, D)
    value = lm(lam)
    rate = (lam * D - value) / LN2
    if lm.method == "closed" and lm.P.mean == 0 and lm.Q.mean == 0:
        from .gaussian import rate_pqd_gaussian

        sol = rate_pqd_gaussian(lm.P.variance, lm.Q.variance, D)
        sol.rate_bits = rate
        sol.lmi_bits = rate - sol.gap_bits
        sol.log_mgf_value = value
        return sol
    lm_q = lm if lm.method == "quadrature" else LogMgf(P, Q, distortion, method="quadrature")
    channel = TiltedChannel(lm_q, lam)
    diagnostics = {"tilted_distortion": channel.distortion()}
    if lm.q_discrete:
        W = channel.conditional()
        qs = lm.x_weights @ W
        qs = qs / qs.sum()
        support = list(lm.y_support)
        probs = qs
        if len(support) != len(Q.support):
            probs = np.array([qs[support.index(s)] if s in support else 0.0 for s in Q.support])
            support = list(Q.support)
        q_star = DiscreteDistribution(support, probs / probs.sum())
        keep = qs > 0
        gap = float(np.sum(qs[keep] * (np.log(qs[keep]) - lm.log_q[keep])))
    else:
        q_star, gap, mass = _continuous_favorite(channel)
        diagnostics["favorite_mass"] = mass
    gap_bits = gap / LN2
    return RateSolution(
        D=float(D),
        lambda_star=lam,
        rate_bits=float(rate),
        lmi_bits=float(rate - gap_bits),
        gap_bits=float(gap_bits),
        q_star=q_star,
        extremes=lm.extremes,
        log_mgf_value=float(value),
        channel=channel,
        diagnostics=diagnostics,
    )


def log_mgf(P, Q, distortion, method="auto") -> LogMgf:
    return LogMgf(P, Q, distortion, method=method)


def q_star(P, Q, distortion, D, method="auto"):
    """The favorite type ``Q*`` (a pmf, or a density object for continuous ``Q``)."""
    return rate_pqd(P, Q, distortion, D, method=method).q_star
