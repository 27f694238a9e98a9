"""Rate theory and Monte Carlo validation of mismatched random codebooks."""

__version__ = "0.1.0"

from .distortion import (
    BlockDistortion,
    Distortion,
    DistortionExtremes,
    Hamming,
    MaxEntropyNoise,
    PowerR,
    SquaredError,
    Table,
    extremes,
    in_ball,
    max_entropy,
    rho_n,
)
from .distributions import (
    DiscreteDistribution,
    DiscreteIID,
    ExponentialFamily,
    Gaussian,
    GaussianIID,
    KBlockMarginal,
    MarkovChain,
    eval_mass_or_density,
    k_block_marginal,
    sample,
)
from .ratefn import (
    additive_mi,
    cstar_interval,
    flat_asymptote,
    lmi_direct,
    lmi_kblock,
    q_star,
    rate_kblock,
    rate_pqd,
    rate_pqd_gaussian,
    relative_entropy,
    slb_bound,
)
