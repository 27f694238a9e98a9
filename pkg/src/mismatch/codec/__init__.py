"""First-match coding with memoryless codebooks."""

from .codebook import (
    DEFAULT_BUDGET,
    Codebook,
    MatchTrace,
    PatternScanner,
    audit_trace,
    first_match,
    index_cap,
)
from .conditional import LatticeBall
from .elias import (
    decode_sequence,
    elias_decode,
    elias_encode,
    elias_length,
    encode_sequence,
    pack_bits,
    unpack_bits,
)
from .experiments import (
    BallEstimate,
    EntropyEstimate,
    FavoriteTypeReport,
    ball_log_prob,
    block_symbols,
    default_b,
    entropy_estimates,
    favorite_type,
    index_entropy_estimate,
    naive_code_length,
    sample_blocks,
    simulate,
)
from .geometric import (
    TruncatedGeometric,
    geometric_fit,
    mixture_entropy,
    mixture_entropy_bound,
    truncated_geometric_entropy,
)
from .quantizer import ScalarQuantizerWQC, wqc_build

__all__ = [
    "DEFAULT_BUDGET",
    "BallEstimate",
    "Codebook",
    "EntropyEstimate",
    "FavoriteTypeReport",
    "LatticeBall",
    "MatchTrace",
    "PatternScanner",
    "ScalarQuantizerWQC",
    "TruncatedGeometric",
    "audit_trace",
    "ball_log_prob",
    "block_symbols",
    "decode_sequence",
    "default_b",
    "elias_decode",
    "elias_encode",
    "elias_length",
    "encode_sequence",
    "entropy_estimates",
    "favorite_type",
    "first_match",
    "geometric_fit",
    "index_cap",
    "index_entropy_estimate",
    "mixture_entropy",
    "mixture_entropy_bound",
    "naive_code_length",
    "pack_bits",
    "sample_blocks",
    "simulate",
    "truncated_geometric_entropy",
    "unpack_bits",
    "wqc_build",
]
