import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mismatch import DiscreteDistribution, DiscreteIID, Gaussian, GaussianIID, Hamming, SquaredError, rho_n
from mismatch.codec import (
    Codebook,
    LatticeBall,
    PatternScanner,
    TruncatedGeometric,
    audit_trace,
    ball_log_prob,
    decode_sequence,
    elias_decode,
    elias_encode,
    elias_length,
    encode_sequence,
    entropy_estimates,
    favorite_type,
    first_match,
    geometric_fit,
    index_cap,
    index_entropy_estimate,
    mixture_entropy,
    mixture_entropy_bound,
    naive_code_length,
    pack_bits,
    sample_blocks,
    simulate,
    truncated_geometric_entropy,
    unpack_bits,
    wqc_build,
)
from mismatch.errors import DomainError, FormatError, ModelError, ResourceError, ShapeError
from mismatch.oracle import brute_ball_prob

bern = DiscreteDistribution.bernoulli
H = Hamming()
SE = SquaredError()


class TestElias:
    def test_small_codewords(self):
        assert elias_encode(1) == "1"
        assert elias_encode(2) == "0100"
        assert elias_encode(17) == "001010001"

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            elias_encode(0)

    @given(st.integers(1, 2**62))
    def test_roundtrip_and_length(self, k):
        bits = elias_encode(k)
        assert len(bits) == elias_length(k)
        assert elias_decode(bits) == (k, len(bits))

    @given(st.lists(st.integers(1, 10**9), max_size=30))
    def test_sequence_roundtrip(self, ks):
        bits = encode_sequence(ks)
        assert list(decode_sequence(bits)) == ks
        assert unpack_bits(pack_bits(bits), len(bits)) == bits

    def test_truncated_input(self):
        with pytest.raises(FormatError):
            elias_decode("0010")


class TestGeometric:
    def test_pmf_sums_to_one(self):
        g = TruncatedGeometric(0.1, 50)
        total = sum(g.pmf(k) for k in range(1, 52))
        assert total == pytest.approx(1.0)
        assert g.pmf(51) == pytest.approx(0.9**50)

    def test_entropy_matches_direct_sum(self):
        g = TruncatedGeometric(0.05, 200)
        p = np.array([g.pmf(k) for k in range(1, 202)])
        assert g.entropy_bits() == pytest.approx(-(p * np.log2(p)).sum())

    def test_large_cap_approaches_untruncated(self):
        p = 0.01
        full = (-(1 - p) * math.log2(1 - p) - p * math.log2(p)) / p
        assert truncated_geometric_entropy(p, 10**9) == pytest.approx(full, rel=1e-9)

    @given(st.floats(0.05, 0.5), st.integers(1, 5), st.integers(0, 1000))
    @settings(max_examples=30, deadline=None)
    def test_mixture_bound(self, alpha, k, seed):
        gen = np.random.default_rng(seed)
        qs = gen.uniform(alpha, 1.0, size=k)
        w = gen.dirichlet(np.ones(k))
        assert mixture_entropy(qs, w, 2000) <= mixture_entropy_bound(alpha) + 1e-12

    def test_fit_accepts_geometric_samples(self):
        g = TruncatedGeometric(0.05, 400)
        samples = g.sample(np.random.default_rng(0).random(20_000))
        _, pval, _ = geometric_fit(samples, 0.05, 400)
        assert pval > 1e-3

    def test_fit_rejects_wrong_parameter(self):
        samples = TruncatedGeometric(0.05, 400).sample(np.random.default_rng(0).random(20_000))
        _, pval, _ = geometric_fit(samples, 0.08, 400)
        assert pval < 1e-6


class TestCodebook:
    def test_cap(self):
        assert index_cap(10, 1.0) == 1024
        assert index_cap(3, 0.5) == 2

    def test_words_are_addressable(self):
        cb = Codebook(6, bern(0.5), seed=9)
        block = cb.words(1, 20)
        assert np.array_equal(block[7], cb.word(8))
        assert np.array_equal(cb.words(5, 3), block[4:7])

    def test_first_match_is_first(self):
        cb = Codebook(10, bern(0.5), seed=4)
        x = [0, 1] * 5
        tr = first_match(x, cb, H, 0.2, b=2.0, audit=True)
        assert not tr.truncated
        assert rho_n(x, cb.words(tr.index, 1)[0], H) <= 0.2
        assert audit_trace(x, cb, H, 0.2, tr)

    def test_truncation(self):
        cb = Codebook(12, bern(0.99), seed=1)
        tr = first_match([0] * 12, cb, H, 0.0, b=0.5)
        assert tr.truncated and tr.index_prime == tr.cap + 1 == 65

    def test_budget(self):
        cb = Codebook(20, bern(0.99), seed=1)
        with pytest.raises(ResourceError):
            first_match([0] * 20, cb, H, 0.0, b=1.0, budget=1000)

    def test_wrong_length(self):
        with pytest.raises(ShapeError):
            first_match([0, 1], Codebook(3, bern(0.5), 0), H, 0.3, 1.0)

    def test_continuous_codebook(self):
        cb = Codebook(4, Gaussian(1.0), seed=2)
        x = np.array([0.1, -0.2, 0.5, 0.0])
        tr = first_match(x, cb, SE, 0.5, b=4.0, audit=True)
        assert not tr.truncated

    def test_threads_do_not_change_results(self):
        args = (DiscreteIID(bern(0.3)), bern(0.5), H, 0.2, 16, 40)
        one = [t.index_prime for t in simulate(*args, seed=3, b=1.0, threads=1)]
        four = [t.index_prime for t in simulate(*args, seed=3, b=1.0, threads=4)]
        assert one == four

    def test_pattern_scanner_agrees_with_first_match(self):
        n, D, b = 8, 0.25, 1.0
        cb = Codebook(n, bern(0.8), seed=5)
        X = sample_blocks(DiscreteIID(bern(0.3)), n, 50, seed=2)
        idx, _ = PatternScanner(cb, (0, 1), H).match(X, D, b)
        direct = [first_match(list(x), cb, H, D, b).index_prime for x in X]
        assert list(idx) == direct


class TestQuantizer:
    def test_discrete_identity(self):
        q = wqc_build(bern(0.3), H, 0.1)
        assert q.quantize(1) == 1 and q.quantize(0) == 0
        assert q.code_length(1) == math.ceil(-math.log2(0.3))
        assert q.entropy_bits() == pytest.approx(bern(0.3).entropy_bits())

    def test_grid_meets_distortion(self):
        q = wqc_build(Gaussian(1.0), SE, 0.25)
        x = np.random.default_rng(0).normal(0, 3, 1000)
        assert np.all((x - q.quantize(x)) ** 2 <= 0.25 + 1e-12)
        assert q.step == pytest.approx(1.0)
        assert np.isfinite(q.m_p(2.0))

    def test_escape_cells(self):
        q = wqc_build(Gaussian(1.0), SE, 0.25)
        assert q.code_length(1e3) > q.code_length(0.0)

    def test_zero_distortion_continuous(self):
        with pytest.raises(DomainError):
            wqc_build(Gaussian(1.0), SE, 0.0)

    def test_no_repro_in_reach(self):
        with pytest.raises(ModelError):
            wqc_build(bern(0.3), H, 0.5, repro=(2,))

    def test_naive_length_adds_fallback(self):
        q = wqc_build(bern(0.3), H, 0.0)
        cb = Codebook(12, bern(0.99), seed=1)
        x = [0] * 12
        tr = first_match(x, cb, H, 0.0, b=0.5)
        assert naive_code_length(tr, q, x) == elias_length(65) + q.fallback_bits(x)


class TestLatticeBall:
    @pytest.mark.parametrize("D", [0.0, 0.1, 0.25, 0.5])
    def test_probability_matches_enumeration(self, D):
        x = [0, 1, 1, 0, 0, 0, 1, 0]
        q = np.array([0.1, 0.9])
        costs = H.matrix(x, (0, 1))
        assert LatticeBall(costs, q, D).probability == pytest.approx(brute_ball_prob(x, bern(0.9), H, D), rel=1e-12)

    def test_samples_lie_in_ball(self):
        x = [0, 1, 1, 0, 0, 0, 1, 0]
        ball = LatticeBall(H.matrix(x, (0, 1)), np.array([0.1, 0.9]), 0.25)
        gen = np.random.default_rng(1)
        for _ in range(200):
            w = ball.sample(gen.random(8))
            assert rho_n(x, w, H) <= 0.25

    def test_conditional_law(self):
        # n=2, D=0.5 around x=(0,0): the ball excludes only (1,1)
        ball = LatticeBall(H.matrix([0, 0], (0, 1)), np.array([0.5, 0.5]), 0.5)
        gen = np.random.default_rng(2)
        words = [tuple(ball.sample(gen.random(2))) for _ in range(30_000)]
        assert (1, 1) not in words
        assert words.count((0, 0)) / len(words) == pytest.approx(1 / 3, abs=0.01)


class TestExperiments:
    def test_sample_blocks_deterministic(self):
        a = sample_blocks(DiscreteIID(bern(0.3)), 10, 5, seed=1)
        b = sample_blocks(DiscreteIID(bern(0.3)), 10, 3, seed=1, first=2)
        assert np.array_equal(a[2:], b)

    def test_gaussian_blocks(self):
        X = sample_blocks(GaussianIID(2.0), 1000, 10, seed=1)
        assert X.var() == pytest.approx(2.0, rel=0.05)

    def test_entropy_estimators(self):
        plug, mm, se, distinct = entropy_estimates([1, 1, 2, 2])
        assert plug == pytest.approx(1.0)
        assert mm > plug and distinct == 2

    def test_index_entropy_below_naive(self):
        est = index_entropy_estimate(DiscreteIID(bern(0.3)), Codebook(8, bern(0.9), 1), H, 0.15, 3.0, 5000, seed=3)
        assert 0 < est.plug_in < est.naive_rate
        assert est.truncated_fraction == 0.0

    def test_ball_exponent_monte_carlo_vs_exact(self):
        x = [0, 1, 0, 0, 1, 0, 0, 0]
        exact = ball_log_prob(x, bern(0.5), H, 0.25, exact=True)
        mc = ball_log_prob(x, bern(0.5), H, 0.25, trials=200_000, seed=1)
        assert abs(mc.exponent - exact.exponent) <= 4 * mc.stderr

    def test_favorite_type_methods_agree(self):
        args = (DiscreteIID(bern(0.3)), bern(0.9), H, 0.15, 6, 2000)
        scan = favorite_type(*args, seed=1, method="scan")
        cond = favorite_type(*args, seed=1, method="conditional")
        assert scan.metric == cond.metric == "tv"
        assert np.allclose(scan.average, cond.average, atol=0.03)
