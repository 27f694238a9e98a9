import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mismatch import (
    DiscreteDistribution,
    DiscreteIID,
    ExponentialFamily,
    Gaussian,
    Hamming,
    MarkovChain,
    PowerR,
    SquaredError,
    Table,
    extremes,
    in_ball,
    k_block_marginal,
    max_entropy,
    rho_n,
)
from mismatch import rng
from mismatch.errors import DegenerateDistortionError, DomainError, ShapeError


class TestRng:
    def test_rows_are_addressable(self):
        full = rng.uniform_rows(7, 3, 0, 10, 6)
        assert np.array_equal(full[4:7], rng.uniform_rows(7, 3, 4, 3, 6))

    def test_open_unit_interval(self):
        u = rng.uniforms(1, 0, 10_000)
        assert u.min() > 0 and u.max() < 1

    def test_streams_differ(self):
        assert not np.array_equal(rng.uniforms(1, 0, 8), rng.uniforms(1, 1, 8))

    def test_derive_seed_is_deterministic(self):
        assert rng.derive_seed(5, 1, 2) == rng.derive_seed(5, 1, 2)
        assert rng.derive_seed(5, 1, 2) != rng.derive_seed(5, 2, 1)

    @given(st.integers(0, 2**64 - 1), st.integers(0, 1000), st.integers(1, 9))
    @settings(max_examples=30, deadline=None)
    def test_row_prefix_property(self, seed, first, length):
        a = rng.uniform_rows(seed, 0, first, 2, length)
        b = rng.uniform_rows(seed, 0, first + 1, 1, length)
        assert np.array_equal(a[1], b[0])


class TestDistributions:
    def test_bernoulli(self):
        b = DiscreteDistribution.bernoulli(0.3)
        assert b.pmf(1) == pytest.approx(0.3)
        assert b.entropy_bits() == pytest.approx(0.881290899, abs=1e-9)

    def test_rejects_bad_pmf(self):
        with pytest.raises(ValueError):
            DiscreteDistribution((0, 1), (0.5, 0.6))
        with pytest.raises(ValueError):
            DiscreteDistribution((0, 0), (0.5, 0.5))

    def test_unknown_symbol(self):
        with pytest.raises(DomainError):
            DiscreteDistribution.bernoulli(0.5).index(2)

    def test_sampling_frequency(self):
        x = DiscreteDistribution.bernoulli(0.3).sample_indices(200_000, seed=1)
        assert x.mean() == pytest.approx(0.3, abs=0.005)

    def test_gaussian_density(self):
        g = Gaussian(4.0)
        assert g.pdf(0.0) == pytest.approx(1 / np.sqrt(8 * np.pi))
        assert g.scale == 2.0

    def test_exponential_family_normalized(self):
        q = ExponentialFamily(0.5, 2.0)
        assert q.expect(lambda y: 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_markov_stationary(self):
        chain = MarkovChain.symmetric_binary(0.1)
        assert np.allclose(chain.stationary.probs, [0.5, 0.5])

    def test_markov_sampling_flip_rate(self):
        x = np.asarray(MarkovChain.symmetric_binary(0.1).sample_indices(100_000, seed=2))
        assert np.mean(x[1:] != x[:-1]) == pytest.approx(0.1, abs=0.005)

    def test_k_block_marginal_of_iid_is_product(self):
        P = DiscreteDistribution.bernoulli(0.3)
        joint = k_block_marginal(DiscreteIID(P), 2).joint
        assert joint.pmf((1, 1)) == pytest.approx(0.09)
        assert joint.pmf((0, 1)) == pytest.approx(0.21)


class TestDistortion:
    def test_hamming_and_power(self):
        assert Hamming()(0, 1) == 1 and Hamming()(1, 1) == 0
        assert PowerR(3)(1.0, -1.0) == pytest.approx(8.0)

    def test_rho_n_and_ball(self):
        assert rho_n([0, 1, 1, 0], [0, 0, 1, 1], Hamming()) == 0.5
        assert in_ball([0, 1], [0, 0], Hamming(), 0.5)
        assert not in_ball([0, 1], [1, 0], Hamming(), 0.5)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            rho_n([0, 1], [0], Hamming())

    def test_table_lookup(self):
        t = Table([[0, 2], [1, 0]], source_symbols=("a", "b"), repro_symbols=(0, 1))
        assert t("a", 1) == 2 and t("b", 0) == 1

    def test_extremes_discrete(self):
        ex = extremes(DiscreteDistribution.bernoulli(0.3), DiscreteDistribution.bernoulli(0.9), Hamming())
        assert ex.d_min == 0.0
        assert ex.d_av == pytest.approx(0.3 * 0.1 + 0.7 * 0.9)

    def test_extremes_gaussian(self):
        ex = extremes(Gaussian(1.0), Gaussian(2.0), SquaredError())
        assert (ex.d_min, ex.d_av) == (0.0, pytest.approx(3.0))

    def test_degenerate(self):
        with pytest.raises(DegenerateDistortionError):
            extremes(DiscreteDistribution.bernoulli(0.3), DiscreteDistribution.point_mass(0, (0, 1)), Hamming())

    def test_max_entropy(self):
        assert max_entropy(SquaredError(), 0.5).h_max_bits == pytest.approx(0.5 * np.log2(np.pi * np.e))
        assert max_entropy(PowerR(1), 1.0).h_max_bits == pytest.approx(np.log2(2 * np.e))
        with pytest.raises(DomainError):
            max_entropy(SquaredError(), 0.0)
