"""The matched word's empirical law approaches the favorite type.

Short blocks are scanned directly. Longer blocks draw the match from the
codebook law conditioned on the distortion ball, which has the same law as
scanning.
"""

from mismatch import DiscreteDistribution, DiscreteIID, Hamming, rate_pqd
from mismatch.codec import favorite_type

bern = DiscreteDistribution.bernoulli
P, Q, D = bern(0.3), bern(0.9), 0.15
q_star = rate_pqd(P, Q, Hamming(), D).q_star
print(f"favorite type Q*(1) = {q_star.pmf(1):.4f}, codebook Q(1) = 0.9")

for n in (8, 16, 32, 64, 128):
    r = favorite_type(DiscreteIID(P), Q, Hamming(), D, n, trials=1000, seed=5)
    print(f"n = {n:3d}: average empirical Q(1) = {r.average[1]:.4f}, TV = {r.distance:.4f}, via {r.methods}")
