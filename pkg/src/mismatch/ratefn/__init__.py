"""Single-letter rate theory of mismatched memoryless codebooks."""

from .asymptotics import (
    AsymptoteReport,
    additive_mi,
    cstar_interval,
    flat_asymptote,
    slb_bound,
)
from .dual import (
    LogMgf,
    RateSolution,
    TiltedChannel,
    TiltedDensity,
    log_mgf,
    q_star,
    rate_pqd,
    solve_lambda_star,
)
from .gaussian import (
    favorite_density,
    lambda_star_gaussian,
    log_mgf_gaussian,
    rate_pqd_gaussian,
)
from .kblock import lmi_kblock, product_law, rate_kblock, solve_kblock
from .lmi import lmi_direct, min_coupling_distortion, mutual_information_bits, relative_entropy

__all__ = [
    "AsymptoteReport",
    "LogMgf",
    "RateSolution",
    "TiltedChannel",
    "TiltedDensity",
    "additive_mi",
    "cstar_interval",
    "favorite_density",
    "flat_asymptote",
    "lambda_star_gaussian",
    "lmi_direct",
    "lmi_kblock",
    "log_mgf",
    "log_mgf_gaussian",
    "min_coupling_distortion",
    "mutual_information_bits",
    "product_law",
    "q_star",
    "rate_kblock",
    "rate_pqd",
    "rate_pqd_gaussian",
    "relative_entropy",
    "slb_bound",
    "solve_kblock",
    "solve_lambda_star",
]
