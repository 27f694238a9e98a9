"""Exact ball probabilities and conditional word draws for lattice-valued costs.

Given a source block ``x``, the first matching word of an i.i.d. codebook is
distributed as ``Q^n`` conditioned on the ball ``B(x, D)``, independently of
its index, which is geometric with parameter ``Q^n(B(x, D))``.  When every
``rho(x_i, b)`` is an integer multiple of a common unit, both quantities
follow from a dynamic program over partial cost sums.
"""

import numpy as np

from ..errors import ModelError, SizeError

MAX_SCALE = 1000
MAX_LEVELS = 10**6


def _lattice_scale(costs):
    for s in range(1, MAX_SCALE + 1):
        v = costs * s
        if np.all(np.abs(v - np.rint(v)) <= 1e-9 * np.maximum(1.0, np.abs(v))):
            return s
    raise ModelError("distortion values are not on a common lattice")


class LatticeBall:
    """``Q^n(B(x, D))`` and exact draws from ``Q^n( . | B(x, D))``.

    :param costs: ``(n, |B|)`` array with ``costs[i, b] = rho(x_i, b)``
    :param q: codebook pmf over the ``|B|`` reproduction symbols
    """

    def __init__(self, costs, q, D):
        costs = np.asarray(costs, dtype=float)
        q = np.asarray(q, dtype=float)
        n = costs.shape[0]
        self.n = n
        s = _lattice_scale(costs)
        C = np.rint(costs * s).astype(np.int64)
        L0 = int(np.floor(n * D * s))
        # largest integer budget the floating-point test (sum / s) / n <= D accepts
        L = next((t for t in (L0 + 1, L0, L0 - 1) if (t / s) / n <= D), L0 - 1)
        mins = C.min(axis=1)
        self.C = C - mins[:, None]
        self.level = L - int(mins.sum())
        self.q = q
        if self.level < 0:
            self.log_p = -np.inf
            return
        self.level = min(self.level, int(self.C.max(axis=1).sum()))
        if self.level > MAX_LEVELS:
            raise SizeError("cost lattice too fine for the dynamic program")
        # F[i][t] ~ P(sum_{j >= i} C_j(Y_j) <= t), rows rescaled to max 1
        F = np.empty((n + 1, self.level + 1))
        log_scale = np.zeros(n + 1)
        F[n] = 1.0
        for i in range(n - 1, -1, -1):
            row = np.zeros(self.level + 1)
            for b in np.flatnonzero(q > 0):
                c = self.C[i, b]
                if c <= self.level:
                    row[c:] += q[b] * F[i + 1][: self.level + 1 - c]
            top = row.max()
            if top <= 0:
                self.log_p = -np.inf
                return
            F[i] = row / top
            log_scale[i] = log_scale[i + 1] + np.log(top)
        self.F = F
        self.log_p = float(np.log(F[0][self.level]) + log_scale[0])

    @property
    def probability(self) -> float:
        return float(np.exp(self.log_p))

    def sample(self, u):
        """One conditional word (support indices) from ``n`` uniforms."""
        if not np.isfinite(self.log_p):
            raise ModelError("the ball is empty")
        t = self.level
        out = np.empty(self.n, dtype=np.intp)
        for i in range(self.n):
            room = t - self.C[i]
            w = np.where(room >= 0, self.q * self.F[i + 1][np.maximum(room, 0)], 0.0)
            cdf = np.cumsum(w)
            y = min(int(np.searchsorted(cdf, u[i] * cdf[-1], side="right")), len(w) - 1)
            out[i] = y
            t -= self.C[i, y]
        return out
