"""Wide Gaussian codebooks: the lower mutual information tends to I(X; X+Z).

As the codebook variance grows the rate diverges, but the part left after
removing the relative-entropy gap converges. The limit exceeds the Shannon
rate by at most half a bit.
"""

import math

from mismatch import ExponentialFamily, Gaussian, SquaredError, additive_mi, flat_asymptote, rate_pqd

SE = SquaredError()
D = 0.25
limit = additive_mi(Gaussian(1.0), SE, D)
print(f"I(X; X+Z_D) = {limit:.6f} bits, Shannon rate = {0.5 * math.log2(1 / D):.6f} bits")
for tau2 in (10, 1e2, 1e3, 1e4):
    s = rate_pqd(Gaussian(1.0), Gaussian(tau2), SE, D)
    print(f"tau^2 = {tau2:7g}: R = {s.rate_bits:.5f}, I_m = {s.lmi_bits:.6f}, |I_m - limit| = {abs(s.lmi_bits - limit):.2e}")

print("\nflat exponential-family codebooks exp(-s y^2)")
for s in (1.0, 0.1, 0.01):
    r = flat_asymptote(Gaussian(1.0), ExponentialFamily(s, 2.0), SE, D)
    print(f"s = {s:5g}: upper - lower bound = {r.gap:.5f}, predicted {r.predicted_gap:.5f}")
