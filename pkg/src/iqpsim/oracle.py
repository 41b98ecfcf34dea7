"""Dense statevector oracle for IQP circuits.

This simulator is the ground truth the fast paths are tested against.  It is
deliberately built from the circuit definition (diagonal phases applied to
the uniform superposition, X-basis readout via Walsh-Hadamard transforms),
not from the Ising mapping, so agreement between the two is evidence for the
partition-function correspondence rather than a tautology.

State indexing: basis state z has the bit of qubit i at position n - i
(qubit 1 is the most significant bit), matching the packed-outcome
convention in `circuit`.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ._transforms import fwht, parity_of_and
from .circuit import IqpCircuit, as_bits, pack_bits
from .errors import CapExceededError

DEFAULT_STATE_CAP = 20


def simulate_statevector(circuit: IqpCircuit, cap: int = DEFAULT_STATE_CAP) -> np.ndarray:
    """prod_j D(theta_j, S_j) |+>^n as a dense complex vector."""
    n = circuit.n
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds statevector cap {cap}")
    z = np.arange(1 << n, dtype=np.uint64)
    angle = np.zeros(1 << n, dtype=np.float64)
    for j in circuit.canonical_gate_order():
        g = circuit.gates[j]
        mask = 0
        for q in g.qubits:
            mask |= 1 << (n - q)
        # diagonal action: phase e^{i theta} on even parity of z|S, e^{-i theta} on odd
        angle += g.theta.rad * (1.0 - 2.0 * parity_of_and(z, mask))
    return np.exp(1j * angle) / math.sqrt(2.0**n)


def xbasis_amplitude(state: np.ndarray, s: Sequence[int]) -> complex:
    """<+_s | state> with <+_s| = 2^(-n/2) sum_z (-1)^{s.z} <z|."""
    n = int(round(math.log2(state.shape[0])))
    bits = as_bits(s, n)
    z = np.arange(1 << n, dtype=np.uint64)
    signs = 1.0 - 2.0 * parity_of_and(z, pack_bits(bits))
    return complex((signs * state).sum() / math.sqrt(2.0**n))


def xbasis_probability(state: np.ndarray, s: Sequence[int]) -> float:
    return abs(xbasis_amplitude(state, s)) ** 2


def xbasis_distribution(state: np.ndarray) -> np.ndarray:
    """All 2^n X-basis probabilities at once (full Walsh-Hadamard transform)."""
    n = int(round(math.log2(state.shape[0])))
    return np.abs(fwht(state)) ** 2 / float(2**n)


def xbasis_marginal(state: np.ndarray, measured: Iterable[int], s_m: Sequence[int]) -> float:
    """Marginal probability of outcome bits s_m on the 1-based qubit set `measured`.

    Implemented as a partial Hadamard transform: butterflies only along the
    measured axes, then a probability sum over the unmeasured ones.
    """
    n = int(round(math.log2(state.shape[0])))
    measured = list(measured)
    bits = as_bits(s_m, len(measured))
    if any(q < 1 or q > n for q in measured):
        raise ValueError("measured qubits outside 1..n")
    if len(set(measured)) != len(measured):
        raise ValueError("duplicate measured qubits")
    if not measured:
        return 1.0

    tensor = state.reshape([2] * n)
    for q in measured:
        axis = q - 1
        moved = np.moveaxis(tensor, axis, 0)
        top = moved[0] + moved[1]
        bot = moved[0] - moved[1]
        moved = np.stack([top, bot], axis=0)
        tensor = np.moveaxis(moved, 0, axis)
    probs = np.abs(tensor) ** 2
    other_axes = tuple(ax for ax in range(n) if ax + 1 not in measured)
    if other_axes:
        probs = probs.sum(axis=other_axes)
    # remaining axes are the measured qubits in ascending order
    index = tuple(bits[measured.index(q)] for q in sorted(measured))
    return float(probs[index]) / float(2 ** len(measured))


__all__ = [
    "simulate_statevector",
    "xbasis_amplitude",
    "xbasis_probability",
    "xbasis_distribution",
    "xbasis_marginal",
    "DEFAULT_STATE_CAP",
]
