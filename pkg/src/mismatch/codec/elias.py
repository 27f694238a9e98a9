"""Elias delta code for positive integers, as ``'0'``/``'1'`` strings."""

from ..errors import DomainError, FormatError


def _gamma(k: int) -> str:
    body = bin(k)[2:]
    return "0" * (len(body) - 1) + body


def elias_encode(k: int) -> str:
    """Delta codeword: ``gamma(bit_length(k))`` followed by the low bits of ``k``.

    >>> elias_encode(17)
    '001010001'
    """
    k = int(k)
    if k < 1:
        raise DomainError("Elias code is defined for integers k >= 1")
    body = bin(k)[2:]
    return _gamma(len(body)) + body[1:]


def elias_length(k: int) -> int:
    """``len(elias_encode(k))`` without building the string."""
    k = int(k)
    if k < 1:
        raise DomainError("Elias code is defined for integers k >= 1")
    L = k.bit_length()
    return 2 * (L.bit_length() - 1) + 1 + L - 1


def elias_decode(bits: str, start: int = 0):
    """Decode one codeword from ``bits[start:]``; returns ``(k, consumed)``."""
    pos = start
    zeros = 0
    while pos < len(bits) and bits[pos] == "0":
        zeros += 1
        pos += 1
    if pos + zeros + 1 > len(bits) or pos == len(bits):
        raise FormatError("truncated Elias length prefix")
    head = bits[pos : pos + zeros + 1]
    if any(c not in "01" for c in head):
        raise FormatError("invalid symbol in bit string")
    L = int(head, 2)
    pos += zeros + 1
    if pos + L - 1 > len(bits):
        raise FormatError("truncated Elias payload")
    tail = bits[pos : pos + L - 1]
    if any(c not in "01" for c in tail):
        raise FormatError("invalid symbol in bit string")
    k = int("1" + tail, 2)
    pos += L - 1
    return k, pos - start


def encode_sequence(values) -> str:
    return "".join(elias_encode(v) for v in values)


def decode_sequence(bits: str):
    out, pos = [], 0
    while pos < len(bits):
        k, used = elias_decode(bits, pos)
        out.append(k)
        pos += used
    return out


def pack_bits(bits: str) -> bytes:
    """Pack most-significant-bit first, zero-padded to a byte boundary."""
    if any(c not in "01" for c in bits):
        raise FormatError("bit string may contain only '0' and '1'")
    pad = (-len(bits)) % 8
    padded = bits + "0" * pad
    return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


def unpack_bits(data: bytes, nbits: int) -> str:
    bits = "".join(f"{byte:08b}" for byte in data)
    if nbits > len(bits):
        raise FormatError("fewer bits available than requested")
    return bits[:nbits]
