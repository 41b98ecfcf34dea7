"""The Ising model with imaginary couplings, its brute-force partition function,
and the map from partition functions to IQP outcome probabilities.

The Hamiltonian for sites sigma_i in {+1,-1}, field bits s_i and terms
(subset N_j, angle theta_j) is

    -H = sum_i  i*pi*s_i*(1 - sigma_i)/2  +  sum_j  i*theta_j * prod_{i in N_j} sigma_i

and Z = sum over all 2^sites configurations of exp(-H).  Every Boltzmann
factor has unit modulus, so |Z| <= 2^sites.

The joint outcome probability of the corresponding circuit is
P(s) = 2^(-2n) |Z(s)|^2.  The brute force enumerates configurations in
lexicographic order (site 1 the most significant bit) and accumulates the
exponent in the angle domain: one real angle per configuration, a single
complex exponential per term of the sum.  Summation is chunked pairwise with
a fixed chunk size, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._transforms import CHUNK, fwht, parity_of_and
from .angles import Angle
from .circuit import IqpCircuit, OutcomeString, as_bits, pack_bits, unpack_bits
from .errors import CapExceededError, InternalConsistencyError

DEFAULT_Z_CAP = 24
DEFAULT_TABLE_CAP = 20

# |Z|^2 / 4^n may poke above 1 by accumulated rounding; anything worse than
# this is a bug, not noise.
_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class IsingInstance:
    """Multibody Ising Hamiltonian data derived from a circuit and an outcome."""

    sites: int
    terms: tuple[tuple[frozenset[int], Angle], ...]
    field_bits: OutcomeString

    def __post_init__(self) -> None:
        for subset, _ in self.terms:
            if any(q < 1 or q > self.sites for q in subset):
                raise ValueError("term subset outside 1..sites")
        if len(self.field_bits) != self.sites:
            raise ValueError("one field bit per site required")

    @staticmethod
    def from_circuit(circuit: IqpCircuit, outcome: Sequence[int]) -> "IsingInstance":
        bits = as_bits(outcome, circuit.n)
        order = circuit.canonical_gate_order()
        return IsingInstance(
            sites=circuit.n,
            terms=tuple((circuit.gates[j].qubits, circuit.gates[j].theta) for j in order),
            field_bits=bits,
        )


def _site_mask(subset: frozenset[int], sites: int) -> int:
    mask = 0
    for q in subset:
        mask |= 1 << (sites - q)
    return mask


def partition_function_bruteforce(inst: IsingInstance, cap: int = DEFAULT_Z_CAP) -> complex:
    """Z by direct summation over all spin configurations."""
    n = inst.sites
    if n > cap:
        raise CapExceededError(f"{n} sites exceeds brute-force cap {cap}")
    field_mask = _site_mask(frozenset(q for q in range(1, n + 1) if inst.field_bits[q - 1]), n)
    term_masks = [(_site_mask(subset, n), theta.rad) for subset, theta in inst.terms]

    total = 0.0 + 0.0j
    for start in range(0, 1 << n, CHUNK):
        stop = min(start + CHUNK, 1 << n)
        z = np.arange(start, stop, dtype=np.uint64)
        angle = np.pi * np.bitwise_count(np.bitwise_and(z, field_mask)).astype(np.float64)
        for mask, rad in term_masks:
            angle += rad * (1.0 - 2.0 * parity_of_and(z, mask))
        total += complex(np.exp(1j * angle).sum())
    return total


def _clamped_probability(raw: float) -> float:
    if raw < -_CLAMP_TOL or raw > 1.0 + _CLAMP_TOL:
        raise InternalConsistencyError(f"probability {raw} outside [0,1] beyond tolerance")
    return min(max(raw, 0.0), 1.0)


def joint_probability(circuit: IqpCircuit, s: Sequence[int], cap: int = DEFAULT_Z_CAP) -> float:
    """P(s) = 2^(-2n) |Z({s_i}, {theta_j}, G)|^2."""
    z = partition_function_bruteforce(IsingInstance.from_circuit(circuit, s), cap=cap)
    scaled = abs(z) / float(2**circuit.n)
    return _clamped_probability(scaled * scaled)


def probability_vector(circuit: IqpCircuit, cap: int = DEFAULT_TABLE_CAP) -> np.ndarray:
    """All 2^n joint probabilities, indexed by the packed outcome.

    The field term contributes exactly (-1)^<s, spin bits>, so the full table
    is one Walsh-Hadamard transform of the field-free Boltzmann vector.
    """
    n = circuit.n
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds table cap {cap}")
    z = np.arange(1 << n, dtype=np.uint64)
    angle = np.zeros(1 << n, dtype=np.float64)
    for j in circuit.canonical_gate_order():
        g = circuit.gates[j]
        angle += g.theta.rad * (1.0 - 2.0 * parity_of_and(z, _site_mask(g.qubits, n)))
    table = np.abs(fwht(np.exp(1j * angle))) ** 2 / float(4**n)
    total = float(table.sum())
    if abs(total - 1.0) > 1e-9:
        raise InternalConsistencyError(f"probability table sums to {total}")
    return table


def probability_table(
    circuit: IqpCircuit, cap: int = DEFAULT_TABLE_CAP
) -> Mapping[OutcomeString, float]:
    vec = probability_vector(circuit, cap=cap)
    n = circuit.n
    return {unpack_bits(idx, n): float(p) for idx, p in enumerate(vec)}


def field_free_log2_bound(inst: IsingInstance) -> float:
    """log2 of the trivial bound |Z| <= 2^sites (used by invariant tests)."""
    return float(inst.sites)


__all__ = [
    "IsingInstance",
    "partition_function_bruteforce",
    "joint_probability",
    "probability_vector",
    "probability_table",
    "DEFAULT_Z_CAP",
    "DEFAULT_TABLE_CAP",
]
