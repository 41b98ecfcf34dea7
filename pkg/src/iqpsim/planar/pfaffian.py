"""Pfaffians of complex skew-symmetric matrices.

Parlett-Reid style congruence elimination: step k clears row/column k beyond
the subdiagonal with rank-2 updates, the Pfaffian picks up the pivot
A[k, k+1], and the recursion continues on the trailing submatrix.  Row and
column exchanges used for pivoting flip the sign.  Pivots are accumulated as
(unit phase, log magnitude) so very large or tiny Pfaffians neither overflow
nor underflow before the final exponentiation.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

# Swap in a larger pivot only when the natural one is this much smaller than
# the column maximum; imaginary couplings produce near-cancelling entries.
PIVOT_RATIO = 1e-3


def pfaffian_phase_logabs(a: np.ndarray, pivot_ratio: float = PIVOT_RATIO) -> tuple[complex, float]:
    """(unit phase, log|Pf|); phase 0 and log -inf for a zero Pfaffian."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    n = a.shape[0]
    if n % 2 == 1:
        return 0.0 + 0.0j, -math.inf
    if n == 0:
        return 1.0 + 0.0j, 0.0
    work = np.array(a, dtype=np.complex128, copy=True)
    phase = 1.0 + 0.0j
    logabs = 0.0
    for k in range(0, n - 1, 2):
        row = work[k, k + 1 :]
        best = int(np.argmax(np.abs(row)))
        best_abs = abs(row[best])
        if best_abs == 0.0:
            return 0.0 + 0.0j, -math.inf
        if best != 0 and abs(row[0]) < pivot_ratio * best_abs:
            j = k + 1 + best
            work[[k + 1, j], :] = work[[j, k + 1], :]
            work[:, [k + 1, j]] = work[:, [j, k + 1]]
            phase = -phase
        pivot = work[k, k + 1]
        phase *= pivot / abs(pivot)
        logabs += math.log(abs(pivot))
        if k + 2 < n:
            mu = work[k, k + 2 :] / pivot
            col = work[k + 2 :, k + 1]
            tail = work[k + 2 :, k + 2 :]
            tail += np.outer(mu, col)
            tail -= np.outer(col, mu)
    return phase, logabs


def pfaffian(a: np.ndarray, pivot_ratio: float = PIVOT_RATIO) -> complex:
    """Pf(a) for complex skew-symmetric a; odd dimension returns 0."""
    phase, logabs = pfaffian_phase_logabs(a, pivot_ratio=pivot_ratio)
    if logabs == -math.inf:
        return 0.0 + 0.0j
    return phase * cmath.exp(logabs)


__all__ = ["pfaffian", "pfaffian_phase_logabs", "PIVOT_RATIO"]
