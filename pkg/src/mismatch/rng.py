"""Counter-based random streams.

Every draw is addressed by ``(seed, stream, position)``: the Philox key is
``(seed, stream)`` and the position selects the counter block.  Two callers
asking for the same address always get the same bits, whatever order or
thread they run in.
"""

import numpy as np

_TWO_M53 = 2.0 ** -53
_U64 = 2 ** 64


def _key(seed, stream):
    return np.array([int(seed) % _U64, int(stream) % _U64], dtype=np.uint64)


def raw_blocks(seed, stream, first_block, n_blocks):
    """Raw 64-bit outputs of Philox4x64 counter blocks.

    Returns an ``(n_blocks, 4)`` array; row ``j`` depends only on
    ``(seed, stream, first_block + j)``.
    """
    if n_blocks <= 0:
        return np.empty((0, 4), dtype=np.uint64)
    counter = np.array([int(first_block) % _U64, 0, 0, 0], dtype=np.uint64)
    bg = np.random.Philox(key=_key(seed, stream), counter=counter)
    return bg.random_raw(4 * int(n_blocks)).reshape(-1, 4)


def to_unit(raw):
    """Map raw uint64 draws to doubles strictly inside (0, 1)."""
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


def uniform_rows(seed, stream, first_row, n_rows, row_len):
    """Uniform (0, 1) draws arranged as rows of length ``row_len``.

    Row ``r`` owns the counter blocks ``[r*k, (r+1)*k)`` with
    ``k = ceil(row_len / 4)``, so any row can be regenerated alone.
    """
    k = max(1, -(-int(row_len) // 4))
    raw = raw_blocks(seed, stream, int(first_row) * k, int(n_rows) * k)
    return to_unit(raw.reshape(int(n_rows), 4 * k)[:, :row_len])


def uniforms(seed, stream, count):
    """A flat stream of ``count`` uniforms from position 0."""
    raw = raw_blocks(seed, stream, 0, -(-int(count) // 4))
    return to_unit(raw.reshape(-1)[:count])


def derive_seed(seed, *labels):
    """Child seed from a parent seed and integer labels (SeedSequence hash)."""
    ss = np.random.SeedSequence([int(seed) % _U64, *[int(v) for v in labels]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
