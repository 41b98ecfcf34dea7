"""Shared bit-level numerics: parity masks and the fast Walsh-Hadamard transform."""

from __future__ import annotations

import numpy as np

# Summing huge exp() arrays in fixed-size chunks keeps memory flat and the
# reduction order deterministic.
CHUNK = 1 << 20


def parity_of_and(values: np.ndarray, mask: int) -> np.ndarray:
    """Parity of popcount(values & mask) as a 0/1 int8 array."""
    masked = np.bitwise_and(values, mask)
    return (np.bitwise_count(masked) & 1).astype(np.int8)


def fwht(vec: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform: out[s] = sum_z (-1)^<s,z> vec[z].

    In-place butterflies on a copy, O(n 2^n).  Bit i of the array index is
    the same bit for input and output, so the caller's packing convention is
    preserved.
    """
    out = np.array(vec, copy=True)
    size = out.shape[0]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        view = out.reshape(-1, 2 * h)
        x = view[:, :h].copy()
        y = view[:, h:].copy()
        view[:, :h] = x + y
        view[:, h:] = x - y
        h *= 2
    return out
