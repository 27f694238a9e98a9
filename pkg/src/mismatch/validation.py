"""Oracle-versus-solver cross-checks on random small instances."""

from dataclasses import dataclass

import numpy as np

from .distortion import Table, extremes
from .distributions import DiscreteDistribution
from .errors import MismatchError
from .oracle import brute_lmi, brute_rate_min
from .ratefn import lmi_direct, min_coupling_distortion, rate_pqd

TOLERANCE = 1e-5


@dataclass(frozen=True)
class Instance:
    P: DiscreteDistribution
    Q: DiscreteDistribution
    distortion: Table
    D: float
    Q_tilde: DiscreteDistribution
    D_lmi: float


@dataclass(frozen=True)
class CheckRow:
    instance: int
    check: str
    solver: float
    oracle: float
    tolerance: float

    @property
    def diff(self):
        return abs(self.solver - self.oracle)

    @property
    def passed(self):
        return bool(self.diff <= self.tolerance)


def _pmf(gen, k):
    p = gen.dirichlet(np.ones(k))
    p = np.maximum(p, 0.02)
    return p / p.sum()


def random_instances(count, seed=0, max_a=3, max_b=4):
    """Random finite instances with ``D`` strictly inside the admissible ranges."""
    gen = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = int(gen.integers(2, max_a + 1)), int(gen.integers(2, max_b + 1))
        P = DiscreteDistribution(range(a), _pmf(gen, a))
        Q = DiscreteDistribution(range(b), _pmf(gen, b))
        M = gen.integers(0, 4, size=(a, b)).astype(float)
        rho = Table(M)
        try:
            ex = extremes(P, Q, rho)
        except MismatchError:
            continue
        if ex.d_av - ex.d_min < 0.05:
            continue
        D = ex.d_min + gen.uniform(0.15, 0.85) * (ex.d_av - ex.d_min)
        Qt = DiscreteDistribution(range(b), _pmf(gen, b))
        d_ot = min_coupling_distortion(P.probs, Qt.probs, M)
        d_ind = float(P.probs @ M @ Qt.probs)
        if d_ind - d_ot < 0.05:
            continue
        D_lmi = d_ot + gen.uniform(0.15, 0.85) * (d_ind - d_ot)
        out.append(Instance(P, Q, rho, float(D), Qt, float(D_lmi)))
    return out


def cross_validate(instances, tolerance=TOLERANCE):
    """Compare the dual rate solver and ``lmi_direct`` with the primal oracles."""
    rows = []
    for i, inst in enumerate(instances):
        sol = rate_pqd(inst.P, inst.Q, inst.distortion, inst.D)
        brute = brute_rate_min(inst.P, inst.Q, inst.distortion, inst.D)
        rows.append(CheckRow(i, "rate_pqd", sol.rate_bits, brute.value_bits, tolerance))
        rows.append(CheckRow(i, "rate_sweep", sol.rate_bits, brute.sweep_bits, tolerance))
        try:
            direct = lmi_direct(inst.P, inst.Q_tilde, inst.distortion, inst.D_lmi)
        except MismatchError:
            direct = float("nan")
        rows.append(CheckRow(i, "lmi_direct", direct, brute_lmi(inst.P, inst.Q_tilde, inst.distortion, inst.D_lmi), tolerance))
    return rows
