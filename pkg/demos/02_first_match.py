"""First-match coding: the log of the index grows like n times the rate.

Each block is matched against a fresh codebook and the first word within
distortion D is transmitted by its index.
"""

import numpy as np

from mismatch import DiscreteDistribution, DiscreteIID, Hamming, rate_pqd
from mismatch.codec import Codebook, first_match, simulate

bern = DiscreteDistribution.bernoulli
P, Q, D = bern(0.3), bern(0.5), 0.2
R = rate_pqd(P, Q, Hamming(), D).rate_bits
print(f"R(P, Q, D) = {R:.4f} bits/symbol")

for n in (10, 20, 40):
    traces = simulate(DiscreteIID(P), Q, Hamming(), D, n, trials=200, seed=1, b=R + 0.5)
    rate = np.mean([t.log_index_rate for t in traces])
    elias = np.mean([t.elias_bits for t in traces]) / n
    print(f"n = {n:2d}: mean (1/n) log2 N = {rate:.4f}, Elias bits/symbol = {elias:.4f}")

x = [0, 1, 0, 0, 1, 0, 0, 0, 1, 0]
trace = first_match(x, Codebook(10, Q, seed=7), Hamming(), D, b=R + 0.5, audit=True)
print(f"\nblock {x} matched at index {trace.index} with distortion {trace.rho:.2f}")
print(f"matched word           {trace.matched_word.tolist()}")
