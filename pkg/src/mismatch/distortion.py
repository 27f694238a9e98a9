"""Single-letter distortion measures and the quantities built from them."""

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from . import rng
from .distributions import DiscreteDistribution, Gaussian
from .errors import DegenerateDistortionError, DomainError, ModelError, ShapeError

BOUNDARY_EPS = 1e-12


class Distortion:
    """A map ``rho(x, y) >= 0``, vectorized over numpy broadcasting."""

    is_difference = False
    power: Optional[float] = None

    def __call__(self, x, y):
        raise NotImplementedError

    def matrix(self, xs: Sequence, ys: Sequence) -> np.ndarray:
        """``rho`` on the product of two supports, rows indexed by ``xs``."""
        xs = np.asarray(list(xs), dtype=float)
        ys = np.asarray(list(ys), dtype=float)
        return np.asarray(self(xs[:, None], ys[None, :]), dtype=float)

    def kernel_width(self, lam):
        """Length scale over which ``exp(lam * rho)`` decays (difference types)."""
        raise NotImplementedError


class Hamming(Distortion):
    def __call__(self, x, y):
        return (np.asarray(x) != np.asarray(y)).astype(float)

    def matrix(self, xs, ys):
        xs, ys = list(xs), list(ys)
        return np.array([[0.0 if a == b else 1.0 for b in ys] for a in xs])

    def __repr__(self):
        return "Hamming()"


class PowerR(Distortion):
    """``|y - x| ** r`` for ``r >= 1``."""

    is_difference = True

    def __init__(self, r: float):
        if r < 1:
            raise ValueError("r must be at least 1")
        self.power = float(r)

    def __call__(self, x, y):
        d = np.abs(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
        return d * d if self.power == 2.0 else d**self.power

    def difference(self, z):
        return np.abs(np.asarray(z, dtype=float)) ** self.power

    def kernel_width(self, lam):
        return (1.0 / abs(lam)) ** (1.0 / self.power) if lam != 0 else np.inf

    def __repr__(self):
        return f"PowerR({self.power:g})"

    def __eq__(self, other):
        return isinstance(other, PowerR) and other.power == self.power

    def __hash__(self):
        return hash(("PowerR", self.power))


class SquaredError(PowerR):
    def __init__(self):
        super().__init__(2.0)

    def __repr__(self):
        return "SquaredError()"


class Table(Distortion):
    """An explicit matrix ``rho[i, j]`` between two finite alphabets."""

    def __init__(self, matrix, source_symbols=None, repro_symbols=None):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2:
            raise ShapeError("distortion table must be two-dimensional")
        if np.any(M < 0) or not np.all(np.isfinite(M)):
            raise ValueError("distortion values must be finite and nonnegative")
        M.setflags(write=False)
        self.table = M
        self.source_symbols = tuple(range(M.shape[0]) if source_symbols is None else source_symbols)
        self.repro_symbols = tuple(range(M.shape[1]) if repro_symbols is None else repro_symbols)
        if len(self.source_symbols) != M.shape[0] or len(self.repro_symbols) != M.shape[1]:
            raise ShapeError("symbol labels do not match the table dimensions")
        self._row = {s: i for i, s in enumerate(self.source_symbols)}
        self._col = {s: j for j, s in enumerate(self.repro_symbols)}

    def _lookup(self, index, symbols):
        try:
            return np.array([index[s] for s in symbols], dtype=np.intp)
        except KeyError as exc:
            raise DomainError(f"symbol {exc.args[0]!r} not in the distortion table") from None

    def __call__(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        x, y = np.broadcast_arrays(x, y)
        rows = self._lookup(self._row, x.ravel().tolist())
        cols = self._lookup(self._col, y.ravel().tolist())
        return self.table[rows, cols].reshape(x.shape)

    def matrix(self, xs, ys):
        rows = self._lookup(self._row, list(xs))
        cols = self._lookup(self._col, list(ys))
        return self.table[np.ix_(rows, cols)]

    def __repr__(self):
        return f"Table({self.table.tolist()})"


class BlockDistortion(Distortion):
    """Sum of a single-letter measure over the coordinates of k-tuples."""

    def __init__(self, base: Distortion, k: int):
        self.base = base
        self.k = int(k)

    def matrix(self, xs, ys):
        xs, ys = list(xs), list(ys)
        out = np.zeros((len(xs), len(ys)))
        for i in range(self.k):
            ax = [t[i] for t in xs]
            ay = [t[i] for t in ys]
            ux, uy = sorted(set(ax), key=ax.index), sorted(set(ay), key=ay.index)
            M = self.base.matrix(ux, uy)
            ix = np.array([ux.index(a) for a in ax])
            iy = np.array([uy.index(b) for b in ay])
            out += M[np.ix_(ix, iy)]
        return out

    def __repr__(self):
        return f"BlockDistortion({self.base!r}, k={self.k})"


def load_table_csv(path) -> Table:
    """Read a table distortion; rows are source symbols, columns reproductions.

    A header row (first cell ignored) and a label column are optional.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]

    def numeric(cells):
        try:
            [float(c) for c in cells]
            return True
        except ValueError:
            return False

    repro = None
    if not numeric(rows[0]):
        repro = [c.strip() for c in rows[0][1:]]
        rows = rows[1:]
    source = None
    if rows and not numeric(rows[0]):
        source = [r[0].strip() for r in rows]
        rows = [r[1:] for r in rows]
    M = [[float(c) for c in r] for r in rows]
    return Table(M, source, repro)


# --------------------------------------------------------------------------
# block distortion and balls


def rho_n(x_block, y_block, distortion: Distortion) -> float:
    """Per-letter average distortion between two equal-length blocks."""
    x = np.asarray(x_block)
    y = np.asarray(y_block)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ShapeError(f"blocks must be 1-D of equal positive length, got {x.shape} and {y.shape}")
    return float(np.sum(distortion(x, y)) / x.size)


def in_ball(x_block, y_block, distortion: Distortion, D: float) -> bool:
    """Closed-ball membership ``rho_n(x, y) <= D``."""
    return rho_n(x_block, y_block, distortion) <= D


# --------------------------------------------------------------------------
# extremes


@dataclass(frozen=True)
class DistortionExtremes:
    d_min: float
    d_av: float

    def contains(self, D):
        return self.d_min < D < self.d_av


def _expect(law, fn):
    """``E[fn(X)]`` for a discrete or continuous law."""
    if getattr(law, "is_discrete", False):
        return float(sum(p * fn(s) for s, p in zip(law.support, law.probs) if p > 0))
    if isinstance(law, Gaussian):
        lo, hi = law.mean - 40 * law.scale, law.mean + 40 * law.scale
    else:
        lo, hi = -law.half_width, law.half_width
    val, _ = integrate.quad(
        lambda t: fn(t) * law.pdf(t), lo, hi, points=[law.argmax], epsabs=1e-12, limit=400
    )
    return val


def extremes(P, Q, distortion: Distortion) -> DistortionExtremes:
    """``(D_min, D_av)`` for source marginal ``P`` and codebook law ``Q``."""
    P = getattr(P, "marginal", P)
    p_disc = getattr(P, "is_discrete", False)
    q_disc = getattr(Q, "is_discrete", False)

    if p_disc and q_disc:
        M = distortion.matrix(P.support, Q.support)
        keep = Q.probs > 0
        d_min = float(P.probs @ M[:, keep].min(axis=1))
        d_av = float(P.probs @ M @ Q.probs)
    elif isinstance(distortion, PowerR):
        if q_disc:
            ys = Q.values()[Q.probs > 0]
            d_min = _expect(P, lambda x: float(np.min(distortion(x, ys))))
            d_av = _expect(P, lambda x: float(Q.probs @ distortion(x, Q.values())))
        else:
            # continuous Q with full support: the infimum over y of |y-x|^r is 0
            d_min = 0.0
            if distortion.power == 2.0 and isinstance(Q, Gaussian) and isinstance(P, Gaussian):
                d_av = P.variance + Q.variance + (P.mean - Q.mean) ** 2
            elif distortion.power == 2.0:
                m2p = _expect(P, lambda x: x * x)
                m1p = _expect(P, lambda x: x)
                m2q = _expect(Q, lambda y: y * y)
                m1q = _expect(Q, lambda y: y)
                d_av = m2p - 2 * m1p * m1q + m2q
            else:
                d_av = _expect(P, lambda x: _expect(Q, lambda y: float(distortion(x, y))))
    else:
        raise ModelError(f"{distortion!r} is not defined between these alphabets")

    if not np.isfinite(d_av):
        raise ModelError("average distortion D_av is infinite")
    if not d_min < d_av:
        raise DegenerateDistortionError(
            f"D_min = D_av = {d_av:.6g}: distortion is constant in y"
        )
    return DistortionExtremes(d_min, d_av)


# --------------------------------------------------------------------------
# maximum-entropy noise


@dataclass(frozen=True)
class Laplace:
    """Zero-mean Laplace law with ``E|Z| = scale``."""

    scale: float
    is_discrete = False

    @property
    def peak(self):
        return 1.0 / (2 * self.scale)

    @property
    def argmax(self):
        return 0.0

    def logpdf(self, z):
        return -np.log(2 * self.scale) - np.abs(np.asarray(z, dtype=float)) / self.scale

    def pdf(self, z):
        return np.exp(self.logpdf(z))

    def from_uniforms(self, u):
        u = np.asarray(u) - 0.5
        return -self.scale * np.sign(u) * np.log1p(-2 * np.abs(u))

    def sample(self, count, seed, stream=0):
        return self.from_uniforms(rng.uniforms(seed, stream, count))

    def entropy_bits(self):
        return float(np.log2(2 * np.e * self.scale))


@dataclass(frozen=True)
class MaxEntropyNoise:
    """The density maximizing differential entropy subject to ``E rho(Z) <= D``."""

    distortion: Distortion
    level: float
    h_max_bits: float
    noise: object

    def pdf(self, z):
        return self.noise.pdf(z)

    def sample(self, count, seed, stream=0):
        return self.noise.sample(count, seed, stream)


def max_entropy(distortion: Distortion, D: float) -> MaxEntropyNoise:
    """Max-entropy noise for squared error (Gaussian) or ``|z|`` (Laplace)."""
    if not D > 0:
        raise DomainError("distortion level must be positive")
    if isinstance(distortion, PowerR) and distortion.power == 2.0:
        noise = Gaussian(D)
        h = 0.5 * np.log2(2 * np.pi * np.e * D)
    elif isinstance(distortion, PowerR) and distortion.power == 1.0:
        noise = Laplace(D)
        h = float(np.log2(2 * np.e * D))
    else:
        raise NotImplementedError(
            f"no closed-form max-entropy law for {distortion!r}; see cstar_interval"
        )
    return MaxEntropyNoise(distortion, float(D), float(h), noise)


def h_max_bits(distortion: Distortion, D: float) -> float:
    return max_entropy(distortion, D).h_max_bits
