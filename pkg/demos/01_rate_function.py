"""The rate of a mismatched codebook and its decomposition.

A Bernoulli(0.3) source is described with words drawn i.i.d. from
Bernoulli(0.9). The rate splits into a lower mutual information plus the
relative entropy between the favorite type and the codebook law.
"""

from mismatch import DiscreteDistribution, Gaussian, Hamming, SquaredError, rate_pqd, rate_pqd_gaussian

bern = DiscreteDistribution.bernoulli

print("Bernoulli(0.3) source, Bernoulli(0.9) codebook, Hamming distortion")
print(f"{'D':>6} {'lambda*':>9} {'rate':>8} {'I_m':>8} {'gap':>8}  favorite type")
for D in (0.05, 0.10, 0.15, 0.20, 0.25):
    s = rate_pqd(bern(0.3), bern(0.9), Hamming(), D)
    print(f"{D:6.2f} {s.lambda_star:9.4f} {s.rate_bits:8.4f} {s.lmi_bits:8.4f} {s.gap_bits:8.4f}  "
          f"Q*(1) = {s.q_star.pmf(1):.4f}")

print("\nGaussian source N(0,1), codebook N(0, tau^2), squared error, D = 0.25")
for tau2 in (0.75, 2.0, 10.0):
    quad = rate_pqd(Gaussian(1.0), Gaussian(tau2), SquaredError(), 0.25, method="quadrature")
    closed = rate_pqd_gaussian(1.0, tau2, 0.25)
    print(f"tau^2 = {tau2:5.2f}: quadrature {quad.rate_bits:.10f}  closed form {closed.rate_bits:.10f}")
