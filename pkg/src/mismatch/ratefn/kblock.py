"""Rates over k-blocks of super-symbols with a memoryless codebook ``Q^k``."""

from itertools import product

import numpy as np

from ..distortion import BlockDistortion
from ..distributions import MAX_BLOCK_SUPPORT, DiscreteDistribution, k_block_marginal
from ..errors import SizeError
from .dual import rate_pqd


def product_law(Q: DiscreteDistribution, k: int) -> DiscreteDistribution:
    """``Q^k`` on k-tuples, ordered lexicographically."""
    if len(Q) ** k > MAX_BLOCK_SUPPORT:
        raise SizeError(f"|Q|^k = {len(Q)}^{k} exceeds {MAX_BLOCK_SUPPORT}")
    idx = list(product(range(len(Q)), repeat=k))
    probs = np.array([np.prod(Q.probs[list(t)]) for t in idx])
    support = [tuple(Q.support[i] for i in t) for t in idx]
    return DiscreteDistribution(support, probs / probs.sum())


def solve_kblock(source, Q, distortion, D, k):
    """The block solution of ``R(P_k, Q^k, kD)`` under the summed distortion."""
    Pk = k_block_marginal(source, k).joint
    return rate_pqd(Pk, product_law(Q, k), BlockDistortion(distortion, k), k * D)


def rate_kblock(source, Q, distortion, D, k) -> float:
    """``R(P_k, Q^k, kD) / k`` in bits per symbol."""
    return solve_kblock(source, Q, distortion, D, k).rate_bits / k


def lmi_kblock(source, Q, distortion, D, k) -> float:
    """``I_m(P_k || Q*_{P_k, Q^k, kD}, kD) / k`` in bits per symbol."""
    return solve_kblock(source, Q, distortion, D, k).lmi_bits / k
