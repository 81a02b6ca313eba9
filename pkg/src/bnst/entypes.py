"""
Enumerative coding over a balanced type class.

A frame of N symbols from an M-ary alphabet is restricted to sequences in
which every symbol appears exactly N/M times. Those sequences are indexed
in lexicographic order, so a block of ``floor(log2 |class|)`` bits maps to
one of them and back. Symbols are the integers ``0 .. M-1``.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

__all__ = [
    "TypeClassCodec",
    "type_class_size",
    "capacity_bits",
    "rank",
    "unrank",
    "encode_bits",
    "decode_bits",
]


def _check(n, m):
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if n % m:
        raise ValueError(f"m = {m} does not divide n = {n}")


@lru_cache(maxsize=None)
def _multinomial(counts):
    """Number of arrangements of a multiset with the given counts."""
    total = sum(counts)
    out = math.factorial(total)
    for c in counts:
        out //= math.factorial(c)
    return out


def type_class_size(n, m):
    """``n! / ((n/m)!)**m`` computed exactly."""
    _check(n, m)
    return _multinomial((n // m,) * m)


def capacity_bits(n, m):
    """``floor(log2(type_class_size(n, m)))`` from the exact integer."""
    return type_class_size(n, m).bit_length() - 1


def unrank(index, n, m):
    """
    The `index`-th balanced sequence in lexicographic order.

    >>> unrank(0, 4, 2)
    (0, 0, 1, 1)
    >>> unrank(5, 4, 2)
    (1, 1, 0, 0)
    """
    size = type_class_size(n, m)
    if not 0 <= index < size:
        raise ValueError(f"index {index} outside [0, {size})")
    counts = [n // m] * m
    out = []
    for _ in range(n):
        for s in range(m):
            if counts[s] == 0:
                continue
            counts[s] -= 1
            block = _multinomial(tuple(counts))
            if index < block:
                out.append(s)
                break
            index -= block
            counts[s] += 1
    return tuple(out)


def rank(seq, m=None):
    """
    Lexicographic index of a balanced sequence; inverse of `unrank`.

    Parameters
    ----------
    seq : sequence of int
        Symbols in ``0 .. m-1`` with equal counts.
    m : int, optional
        Alphabet size; defaults to ``max(seq) + 1``.
    """
    seq = [int(s) for s in seq]
    n = len(seq)
    m = (max(seq) + 1) if m is None else m
    _check(n, m)
    counts = [0] * m
    for s in seq:
        if not 0 <= s < m:
            raise ValueError(f"symbol {s} outside [0, {m})")
        counts[s] += 1
    if any(c != n // m for c in counts):
        raise ValueError(f"sequence is not balanced: counts {counts}")
    index = 0
    for s in seq:
        for smaller in range(s):
            if counts[smaller]:
                counts[smaller] -= 1
                index += _multinomial(tuple(counts))
                counts[smaller] += 1
        counts[s] -= 1
    return index


def _bits_to_int(bits):
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        value = (value << 1) | int(b)
    return value, len(bits)


def encode_bits(bits, n, m):
    """Map ``capacity_bits(n, m)`` bits (MSB first) to a balanced sequence."""
    value, length = _bits_to_int(bits)
    k = capacity_bits(n, m)
    if length != k:
        raise ValueError(f"expected {k} bits, got {length}")
    return unrank(value, n, m)


def decode_bits(seq, n, m):
    """Inverse of `encode_bits`; returns a tuple of bits."""
    if len(seq) != n:
        raise ValueError(f"expected a sequence of length {n}")
    k = capacity_bits(n, m)
    value = rank(seq, m)
    if value >= 1 << k:
        raise ValueError("sequence lies outside the encodable prefix")
    return tuple((value >> (k - 1 - i)) & 1 for i in range(k))


@dataclass(frozen=True)
class TypeClassCodec:
    """
    Bits <-> balanced frames for fixed (n, m), with the alphabet values
    needed to evaluate the frame mean.
    """

    n: int
    m: int

    def __post_init__(self):
        _check(self.n, self.m)

    @property
    def class_size(self):
        return type_class_size(self.n, self.m)

    @property
    def capacity_bits(self):
        return capacity_bits(self.n, self.m)

    @property
    def rate_loss_bits(self):
        """Bits per frame given up relative to unconstrained signalling."""
        return self.n * math.log2(self.m) - self.capacity_bits

    def target_mean(self, symbols):
        """Frame mean ``(1/m) sum c_i`` that every codeword attains."""
        if len(symbols) != self.m:
            raise ValueError("need one value per symbol")
        return sum(complex(c) for c in symbols) / self.m

    def encode(self, bits):
        return encode_bits(bits, self.n, self.m)

    def decode(self, seq):
        return decode_bits(seq, self.n, self.m)

    def encode_int(self, value):
        if not 0 <= value < 1 << self.capacity_bits:
            raise ValueError("payload does not fit in one frame")
        return unrank(value, self.n, self.m)

    def decode_int(self, seq):
        return rank(seq, self.m)
