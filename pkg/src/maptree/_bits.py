"""Word-level bit helpers shared by the dataset, posterior, and graph layers.

Sample i lives at bit (i mod 64) of word floor(i/64), least-significant-bit
first.  All arrays are uint64; arithmetic wraps modulo 2^64.
"""

from __future__ import annotations

import numpy as np

WORD_BITS = 64

# Multipliers of the 128-bit block hash (two independent 64-bit streams).
HASH_MULT_1 = 377424577268497867
HASH_MULT_2 = 285989758769553131

_MASK64 = (1 << 64) - 1

_POW_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def n_words(n_bits: int) -> int:
    return (n_bits + WORD_BITS - 1) // WORD_BITS


def popcount(words: np.ndarray) -> int:
    """Total number of set bits in a word array."""
    return int(np.bitwise_count(words).sum())


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Set-bit count along the last axis (per row for a 2-D array)."""
    return np.bitwise_count(words).sum(axis=-1)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 vector into uint64 words, LSB-first within each word."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    packed = np.packbits(bits, bitorder="little")
    width = n_words(bits.size) * 8
    if packed.size < width:
        packed = np.concatenate([packed, np.zeros(width - packed.size, dtype=np.uint8)])
    return np.frombuffer(packed.tobytes(), dtype="<u8").copy()


def unpack_bits(words: np.ndarray, n_bits: int) -> np.ndarray:
    """Inverse of pack_bits; returns a uint8 0/1 vector of length n_bits."""
    raw = np.frombuffer(np.ascontiguousarray(words, dtype="<u8").tobytes(), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n_bits].copy()


def hash_powers(width: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-block multiplier powers K^b mod 2^64 for both hash streams."""
    cached = _POW_CACHE.get(width)
    if cached is not None:
        return cached
    p1 = np.empty(width, dtype=np.uint64)
    p2 = np.empty(width, dtype=np.uint64)
    a1 = a2 = 1
    for b in range(width):
        p1[b] = a1
        p2[b] = a2
        a1 = (a1 * HASH_MULT_1) & _MASK64
        a2 = (a2 * HASH_MULT_2) & _MASK64
    _POW_CACHE[width] = (p1, p2)
    return p1, p2


def hash_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """128-bit block hash of each row of a (n, width) word matrix."""
    p1, p2 = hash_powers(rows.shape[-1])
    h1 = (rows * p1).sum(axis=-1, dtype=np.uint64)
    h2 = (rows * p2).sum(axis=-1, dtype=np.uint64)
    return h1, h2


def count_valid_splits(cols: np.ndarray, words: np.ndarray, size: int) -> int:
    """Number of features splitting the subset `words` into two nonempty parts."""
    ones = popcount_rows(cols & words)
    return int(np.count_nonzero((ones > 0) & (ones < size)))
