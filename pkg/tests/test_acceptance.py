"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``criterion k [PASS|FAIL]`` line and the full list is
repeated in the pytest terminal summary.  Run alone with::

    python3 -m pytest tests/test_acceptance.py -v
"""

import itertools
import math
import sys
import time

import numpy as np
import pytest

from mismatch import (
    DiscreteDistribution,
    DiscreteIID,
    ExponentialFamily,
    Gaussian,
    Hamming,
    MarkovChain,
    SquaredError,
    additive_mi,
    cstar_interval,
    flat_asymptote,
    lmi_kblock,
    rate_kblock,
    rate_pqd,
    rate_pqd_gaussian,
)
from mismatch.codec import (
    Codebook,
    TruncatedGeometric,
    elias_decode,
    elias_encode,
    favorite_type,
    first_match,
    geometric_fit,
    index_cap,
    index_entropy_estimate,
    mixture_entropy,
    mixture_entropy_bound,
    sample_blocks,
    simulate,
)
from mismatch.oracle import brute_ball_prob, brute_index_entropy
from mismatch.validation import cross_validate, random_instances

bern = DiscreteDistribution.bernoulli
H = Hamming()
SE = SquaredError()


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_criterion_01_gaussian_closed_form(record):
    sigmas = [0.5, 1.0, 2.0, 4.0, 8.0]
    taus = [0.25, 0.75, 2.0, 10.0, 100.0]
    fracs = [0.05, 0.2, 0.4, 0.6, 0.9]
    worst = 0.0
    with Timer() as t:
        for s2, t2, f in itertools.product(sigmas, taus, fracs):
            D = f * (s2 + t2)
            quad = rate_pqd(Gaussian(s2), Gaussian(t2), SE, D, method="quadrature").rate_bits
            closed = rate_pqd_gaussian(s2, t2, D).rate_bits
            worst = max(worst, abs(quad - closed))
    ok = worst <= 1e-6 and t.seconds < 10
    record(1, "Gaussian closed form", ok, f"max |diff| = {worst:.2e} bits on 125 points, {t.seconds:.1f} s")
    assert ok


def test_criterion_02_known_variance(record):
    worst = 0.0
    with Timer() as t:
        for D in (0.1, 0.25, 0.5):
            r = rate_pqd(Gaussian(1.0), Gaussian(1.0 - D), SE, D).rate_bits
            worst = max(worst, abs(r - 0.5 * math.log2(1.0 / D)))
    ok = worst <= 1e-9 and t.seconds < 1
    record(2, "known variance", ok, f"max |R - 1/2 log(s2/D)| = {worst:.2e}, {t.seconds:.2f} s")
    assert ok


def test_criterion_03_first_match_rate(record):
    P, Q, D, n = bern(0.3), bern(0.5), 0.2, 40
    with Timer() as t:
        R = rate_pqd(P, Q, H, D).rate_bits
        traces = simulate(DiscreteIID(P), Q, H, D, n, 200, seed=1, b=R + 0.5)
    mean = float(np.mean([tr.log_index_rate for tr in traces]))
    trunc = float(np.mean([tr.truncated for tr in traces]))
    ok = abs(mean - R) <= 0.1 and trunc < 0.01 and t.seconds < 60
    record(
        3, "first-match rate", ok,
        f"mean (1/n)log N = {mean:.4f}, R = {R:.4f}, |diff| = {abs(mean - R):.4f}, "
        f"truncated {trunc:.1%}, {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_04_ball_exponent(record):
    P, Q, D, n = bern(0.3), bern(0.5), 0.25, 12
    with Timer() as t:
        R = rate_pqd(P, Q, H, D).rate_bits
        X = sample_blocks(DiscreteIID(P), n, 100, seed=4)
        expo = np.array([-math.log2(brute_ball_prob(list(x), Q, H, D)) / n for x in X])
    dev = float(np.mean(np.abs(expo - R)))
    ok = dev <= 0.07 and t.seconds < 30
    record(
        4, "exact ball exponent", ok,
        f"mean |exponent - R| = {dev:.4f} (R = {R:.4f}, mean exponent {expo.mean():.4f}), {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_05_favorite_type(record):
    P, Q, D = bern(0.3), bern(0.9), 0.15
    tvs = []
    with Timer() as t:
        for n in (8, 16, 32, 64):
            tvs.append(favorite_type(DiscreteIID(P), Q, H, D, n, 1000, seed=5).distance)
    decreasing = all(a > b for a, b in zip(tvs, tvs[1:]))
    ok = decreasing and tvs[-1] <= 0.05 and t.seconds < 300
    record(
        5, "favorite type", ok,
        "TV over n=8,16,32,64: " + ", ".join(f"{v:.4f}" for v in tvs)
        + f"; strictly decreasing={decreasing}; {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_06_index_entropy(record):
    P, Q, D, n = bern(0.3), bern(0.9), 0.15, 12
    with Timer() as t:
        sol = rate_pqd(P, Q, H, D)
        b = sol.rate_bits + 0.5
        ests = [
            index_entropy_estimate(DiscreteIID(P), Codebook(n, Q, seed), H, D, b, 10**5, seed=100 + seed)
            for seed in range(8)
        ]
    ent = float(np.mean([e.plug_in for e in ests]))
    naive = float(np.mean([e.naive_rate for e in ests]))
    ok = ent <= sol.lmi_bits + 0.1 and naive - ent >= sol.gap_bits - 0.1 and t.seconds < 600
    record(
        6, "index entropy", ok,
        f"H/n = {ent:.4f} <= I_m + 0.1 = {sol.lmi_bits + 0.1:.4f}; naive - H/n = {naive - ent:.4f} "
        f">= gap - 0.1 = {sol.gap_bits - 0.1:.4f}; {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_07_lmi_asymptote(record):
    D = 0.25
    with Timer() as t:
        target = additive_mi(Gaussian(1.0), SE, D)
        diffs = [abs(rate_pqd(Gaussian(1.0), Gaussian(t2), SE, D).lmi_bits - target) for t2 in (10, 1e2, 1e3, 1e4)]
    exact = abs(target - 0.5 * math.log2(1 + 1 / D)) <= 1e-12
    mono = all(a > b for a, b in zip(diffs, diffs[1:]))
    ok = exact and mono and diffs[-1] <= 0.02 and t.seconds < 30
    record(7, "LMI asymptote", ok, "|I_m - I(X;X+Z)|: " + ", ".join(f"{d:.2e}" for d in diffs) + f"; {t.seconds:.1f} s")
    assert ok


def test_criterion_08_half_bit(record):
    with Timer() as t:
        grid = np.linspace(0.05, 0.95, 20)
        excess = [additive_mi(Gaussian(1.0), SE, D) - 0.5 * math.log2(1.0 / D) for D in grid]
        cstar = cstar_interval(SE)
    ok = max(excess) <= 0.5 and cstar == (0.5, 0.5) and t.seconds < 1
    record(8, "half-a-bit", ok, f"max excess = {max(excess):.4f} bits, C* interval {cstar}, {t.seconds:.2f} s")
    assert ok


def test_criterion_09_kblock(record):
    P, Q, D = bern(0.3), bern(0.5), 0.2
    with Timer() as t:
        R1 = rate_pqd(P, Q, H, D).rate_bits
        worst = max(abs(rate_kblock(DiscreteIID(P), Q, H, D, k) - R1) for k in (1, 2, 3))
        chain = MarkovChain.symmetric_binary(0.1)
        l1 = lmi_kblock(chain, Q, H, 0.1, 1)
        l2 = lmi_kblock(chain, Q, H, 0.1, 2)
    ok = worst <= 1e-6 and l1 - l2 >= 1e-4 and t.seconds < 60
    record(
        9, "k-block identity", ok,
        f"i.i.d. max |R_k - R| = {worst:.2e}; Markov I_m k=1: {l1:.5f}, k=2: {l2:.5f}, {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_10_slb_gap(record):
    D = 0.25
    with Timer() as t:
        reports = [flat_asymptote(Gaussian(1.0), ExponentialFamily(s, 2.0), SE, D) for s in (1.0, 0.1, 0.01, 0.001)]
    err = max(abs(r.gap - r.predicted_gap) for r in reports)
    gaps = [r.gap for r in reports]
    to_zero = all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 0.01
    ok = err <= 1e-8 and to_zero and t.seconds < 5
    record(10, "SLB gap", ok, f"max |gap - s E g log e| = {err:.2e}; gaps " + ", ".join(f"{g:.2e}" for g in gaps) + f"; {t.seconds:.2f} s")
    assert ok


def test_criterion_11_codec_properties(record):
    with Timer() as t:
        bits = "".join(elias_encode(k) for k in range(1, 10**6 + 1))
        pos, roundtrip = 0, True
        for k in range(1, 10**6 + 1):
            v, used = elias_decode(bits, pos)
            roundtrip &= v == k
            pos += used
        length_ok = all(
            len(elias_encode(k)) <= math.log2(k) + 2 * math.log2(math.log2(k) + 1) + 3 for k in range(1, 10**5)
        )
        # geometric law of the index at a fixed block
        P, Q, D, n = bern(0.3), bern(0.5), 0.2, 12
        x = [P.support[i] for i in sample_blocks(DiscreteIID(P), n, 1, seed=11)[0]]
        p = brute_ball_prob(x, Q, H, D)
        b = 2.0
        idx = [first_match(x, Codebook(n, Q, 10_000 + c), H, D, b).index_prime for c in range(10**4)]
        _, pval, _ = geometric_fit(idx, p, index_cap(n, b))
        # mixtures of truncated geometrics
        gen = np.random.default_rng(3)
        lemma = True
        for _ in range(100):
            alpha = gen.uniform(0.05, 0.5)
            beta = gen.uniform(alpha, 1.0)
            k = int(gen.integers(1, 6))
            qs = gen.uniform(alpha, beta, size=k)
            w = gen.dirichlet(np.ones(k))
            lemma &= mixture_entropy(qs, w, 4000) <= mixture_entropy_bound(alpha)
    ok = roundtrip and length_ok and pval > 1e-3 and lemma and t.seconds < 120
    record(
        11, "codec properties", ok,
        f"Elias round-trip 1..1e6 {roundtrip}, length bound {length_ok}; Geom* p-value {pval:.3f} "
        f"(p = {p:.4f}); mixture bound {lemma}; {t.seconds:.1f} s",
    )
    assert ok


def test_criterion_12_oracles(record):
    with Timer() as t:
        rows = cross_validate(random_instances(100, seed=12), tolerance=1e-5)
        worst = {c: max(r.diff for r in rows if r.check == c) for c in {r.check for r in rows}}
        P, Q, D, n = bern(0.3), bern(0.9), 0.15, 6
        b = rate_pqd(P, Q, H, D).rate_bits + 0.5
        cb = Codebook(n, Q, seed=3)
        exact = brute_index_entropy(DiscreteIID(P), cb, H, D, b)
        est = index_entropy_estimate(DiscreteIID(P), cb, H, D, b, 10**5, seed=7)
    z = abs(est.plug_in - exact) / est.stderr
    ok = all(r.passed for r in rows) and z <= 3 and t.seconds < 300
    record(
        12, "oracle cross-validation", ok,
        "worst |diff|: " + ", ".join(f"{k}={v:.1e}" for k, v in sorted(worst.items()))
        + f"; index entropy exact {exact:.5f} vs plug-in {est.plug_in:.5f} ({z:.2f} SE); {t.seconds:.1f} s",
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
