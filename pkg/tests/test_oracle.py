import math

import numpy as np
import pytest

from mismatch import DiscreteDistribution, DiscreteIID, Hamming, Table, rate_pqd
from mismatch.codec import Codebook, index_entropy_estimate
from mismatch.errors import FeasibilityError, SizeError
from mismatch.oracle import (
    blahut_arimoto_rd,
    brute_ball_prob,
    brute_index_entropy,
    brute_lmi,
    brute_rate_min,
    enumerate_words,
)
from mismatch.validation import cross_validate, random_instances

bern = DiscreteDistribution.bernoulli
H = Hamming()


class TestBruteRate:
    def test_plan_marginals(self):
        res = brute_rate_min(bern(0.3), bern(0.9), H, 0.15)
        plan = np.asarray(res.plan)
        assert plan.sum(axis=1) == pytest.approx([0.7, 0.3], abs=1e-8)
        assert np.sum(plan * H.matrix((0, 1), (0, 1))) <= 0.15 + 1e-8

    def test_favorite_type_is_plan_marginal(self):
        res = brute_rate_min(bern(0.3), bern(0.9), H, 0.15)
        sol = rate_pqd(bern(0.3), bern(0.9), H, 0.15)
        assert np.asarray(res.y_marginal) == pytest.approx(sol.q_star.probs, abs=1e-5)

    def test_guard(self):
        P = DiscreteDistribution(range(9), np.full(9, 1 / 9))
        with pytest.raises(SizeError):
            brute_rate_min(P, P, Table(1 - np.eye(9)), 0.5)

    def test_lmi_infeasible(self):
        with pytest.raises(FeasibilityError):
            brute_lmi(bern(0.3), bern(0.8), H, 0.2)


class TestEnumeration:
    def test_enumerate_words(self):
        words, probs = enumerate_words(bern(0.25), 3)
        assert len(words) == 8
        assert sum(probs) == pytest.approx(1.0)

    def test_ball_probability_binomial(self):
        # uniform codebook: ball mass is a binomial tail
        n, D = 10, 0.3
        expected = sum(math.comb(n, k) for k in range(4)) / 2**n
        assert brute_ball_prob([0] * n, bern(0.5), H, D) == pytest.approx(expected)

    def test_index_entropy_matches_estimate(self):
        P, Q, D, n = bern(0.3), bern(0.9), 0.15, 5
        b = rate_pqd(P, Q, H, D).rate_bits + 0.5
        cb = Codebook(n, Q, seed=2)
        exact = brute_index_entropy(DiscreteIID(P), cb, H, D, b)
        est = index_entropy_estimate(DiscreteIID(P), cb, H, D, b, 40_000, seed=1)
        assert abs(est.plug_in - exact) <= 4 * est.stderr + 1e-3

    def test_blahut_arimoto_binary(self):
        h = lambda p: -p * math.log2(p) - (1 - p) * math.log2(1 - p)  # noqa: E731
        assert blahut_arimoto_rd(bern(0.5), H, 0.2, (0, 1)) == pytest.approx(1 - h(0.2), abs=1e-8)


class TestCrossValidation:
    def test_random_instances_pass(self):
        rows = cross_validate(random_instances(5, seed=1))
        assert len(rows) == 15
        assert all(r.passed for r in rows)

    def test_instances_are_reproducible(self):
        a = random_instances(3, seed=4)
        b = random_instances(3, seed=4)
        assert [i.D for i in a] == [i.D for i in b]
