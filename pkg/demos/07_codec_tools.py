"""Building blocks of the codec: Elias codes, truncated geometric laws and
the scalar fallback quantizer used when a search is truncated."""

import numpy as np

from mismatch import DiscreteDistribution, DiscreteIID, Gaussian, Hamming, SquaredError
from mismatch.codec import (
    Codebook,
    TruncatedGeometric,
    decode_sequence,
    encode_sequence,
    first_match,
    geometric_fit,
    index_cap,
    sample_blocks,
    wqc_build,
)
from mismatch.oracle import brute_ball_prob

indices = [1, 5, 17, 1000]
bits = encode_sequence(indices)
print(f"Elias delta of {indices}: {bits} ({len(bits)} bits), decodes to {list(decode_sequence(bits))}")

g = TruncatedGeometric(0.02, 256)
print(f"Geom*(0.02, cap 256): entropy {g.entropy_bits():.4f} bits, P(truncated) = {g.pmf(257):.4f}")

# with a fixed block and fresh codebooks the index is a truncated geometric
bern = DiscreteDistribution.bernoulli
n, D, b = 12, 0.2, 2.0
x = [(0, 1)[i] for i in sample_blocks(DiscreteIID(bern(0.3)), n, 1, seed=11)[0]]
p = brute_ball_prob(x, bern(0.5), Hamming(), D)
idx = [first_match(x, Codebook(n, bern(0.5), c), Hamming(), D, b).index_prime for c in range(3000)]
_, pval, _ = geometric_fit(idx, p, index_cap(n, b))
print(f"ball probability {p:.4f}; chi-square p-value of the geometric fit {pval:.3f}")

q = wqc_build(Gaussian(1.0), SquaredError(), 0.25)
xs = np.array([-1.3, 0.2, 2.6])
print(f"grid quantizer step {q.step}: {xs} -> {q.quantize(xs)}, bits {[q.code_length(v) for v in xs]}")
