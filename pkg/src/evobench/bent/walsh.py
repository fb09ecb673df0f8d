"""Walsh spectrum and nonlinearity of Boolean functions.

Truth tables list ``f(x)`` for ``x`` in lexicographic order of
``(x0, ..., x_{n-1})``, so ``x0`` is the most significant bit of the row
index.  Nonlinearity uses ``max |W_f|``; with the absolute value the
complements of linear functions count as affine too.
"""

from __future__ import annotations

import numba
import numpy as np


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along the last axis.

    Integer input stays integer.  Applying it twice multiplies by the length.
    """
    w = np.array(values, dtype=np.int64 if np.issubdtype(np.asarray(values).dtype, np.integer) else float)
    size = w.shape[-1]
    if size == 0 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    lead = w.shape[:-1]
    h = 1
    while h < size:
        blocks = w.reshape(*lead, size // (2 * h), 2, h)
        a = blocks[..., 0, :]
        b = blocks[..., 1, :]
        w = np.stack((a + b, a - b), axis=-2).reshape(*lead, size)
        h *= 2
    return w


def n_vars_of(table) -> int:
    size = np.asarray(table).shape[-1]
    if size == 0 or size & (size - 1):
        raise ValueError(f"truth table length must be a power of two, got {size}")
    return size.bit_length() - 1


def walsh_spectrum(table) -> np.ndarray:
    """``W_f(a) = sum_x (-1)^(f(x) xor a.x)``."""
    t = np.asarray(table)
    n_vars_of(t)
    return fwht(1 - 2 * t.astype(np.int64))


def nonlinearity(table) -> tuple[np.ndarray, int | np.ndarray]:
    """Return ``(spectrum, nl)``; batched over leading axes."""
    spectrum = walsh_spectrum(table)
    n = n_vars_of(table)
    nl = (1 << (n - 1)) - np.abs(spectrum).max(axis=-1) // 2
    if np.ndim(nl) == 0:
        nl = int(nl)
    return spectrum, nl


def bent_bound(n: int) -> int:
    """Covering radius bound ``2^(n-1) - 2^(n/2-1)`` for even ``n``."""
    if n % 2:
        raise ValueError("bent functions need an even number of variables")
    return (1 << (n - 1)) - (1 << (n // 2 - 1))


def affine_tables(n: int) -> np.ndarray:
    """All 2^(n+1) affine truth tables; rows ``2a`` and ``2a+1`` are ``a.x`` and its complement."""
    x = np.arange(1 << n)
    a = np.arange(1 << n)
    dots = np.zeros((1 << n, 1 << n), dtype=np.uint8)
    for bit in range(n):
        dots ^= (((a[:, None] >> bit) & 1) & ((x[None, :] >> bit) & 1)).astype(np.uint8)
    out = np.empty((2 << n, 1 << n), dtype=np.uint8)
    out[0::2] = dots
    out[1::2] = 1 - dots
    return out


def brute_force_nonlinearity(table) -> int:
    """Minimum Hamming distance to any affine function (test oracle)."""
    t = np.asarray(table, dtype=np.uint8)
    aff = affine_tables(n_vars_of(t))
    return int((aff != t).sum(axis=1).min())


# Packed tables: bit x of a Python int holds f(x).  AND/XOR on 2^n-bit ints is
# far cheaper than per-node numpy calls for the tree evaluator.


def variable_mask(v: int, n: int) -> int:
    x = np.arange(1 << n)
    bits = ((x >> (n - 1 - v)) & 1).astype(np.uint8)
    return pack(bits)


def pack(bits) -> int:
    bits = np.asarray(bits, dtype=np.uint8)
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def unpack(value: int, n: int) -> np.ndarray:
    size = 1 << n
    nbytes = max(1, size // 8)
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size]


# Word-packed tables for the compiled evaluator: bit ``x & 63`` of word
# ``x >> 6`` holds f(x).


def word_count(n: int) -> int:
    return max(1, (1 << n) // 64)


def packed_variable_masks(n: int) -> np.ndarray:
    """(n, words) uint64 table of every projection ``x -> x_v``."""
    x = np.arange(word_count(n) * 64)
    bits = ((x[None, :] >> (n - 1 - np.arange(n)[:, None])) & 1).astype(np.uint8)
    bits[:, 1 << n:] = 0
    packed = np.packbits(bits.reshape(n, -1, 64), axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(n, -1).astype(np.uint64)


@numba.njit(cache=True)
def nl_of_words(words, n):
    """Nonlinearity of a word-packed table via an in-place butterfly."""
    size = 1 << n
    w = np.empty(size, np.int32)
    for x in range(size):
        w[x] = 1 - 2 * np.int32((words[x >> 6] >> np.uint64(x & 63)) & np.uint64(1))
    # two butterfly levels per pass, then a last single level when n is odd
    h = 1
    while 2 * h < size:
        for i in range(0, size, 4 * h):
            for j in range(i, i + h):
                a = w[j]
                b = w[j + h]
                c = w[j + 2 * h]
                d = w[j + 3 * h]
                w[j] = a + b + c + d
                w[j + h] = a - b + c - d
                w[j + 2 * h] = a + b - c - d
                w[j + 3 * h] = a - b - c + d
        h *= 4
    if h < size:
        for j in range(h):
            a = w[j]
            b = w[j + h]
            w[j] = a + b
            w[j + h] = a - b
    peak = 0
    for x in range(size):
        v = abs(w[x])
        if v > peak:
            peak = v
    return size // 2 - peak // 2


def unpack_words(words: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[: 1 << n]
