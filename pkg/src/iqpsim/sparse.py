"""Exact strong simulation and O(poly) weak sampling for sparse circuits.

A circuit whose gate-incidence matrix R has independent columns is solvable:
if R is square (IFRB) the outcome bits can be renormalized into the gate
angles, giving P(s) = prod_j cos^2(theta_j + c_j pi/2) with c = R^{-1} s.
If R is merely independent (IB, fewer gates than qubits) we first pad with
single-qubit theta=0 gates completing the columns to a basis, which leaves
every probability unchanged.

Weak sampling draws c_j ~ Bernoulli(sin^2 theta_j) independently and maps
through s = R c; correctness follows from the bijection between c and s and
the factorized form of the renormalized probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .angles import Angle
from .circuit import (
    IqpCircuit,
    OutcomeString,
    as_bits,
    circuit_to_graph,
    gate,
)
from .errors import NotSparseError
from .gf2 import GF2Matrix, rank, solve


class SparseKind(str, Enum):
    IFRB = "IFRB"
    IB = "IB"
    GENERAL = "General"


@dataclass(frozen=True)
class SparseClassification:
    kind: SparseKind
    padded_gate_count: int
    padding_qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind is SparseKind.IFRB and self.padded_gate_count:
            raise ValueError("IFRB needs no padding")


def incidence_matrix(circuit: IqpCircuit) -> GF2Matrix:
    return GF2Matrix.from_graph(circuit_to_graph(circuit))


def _basis_completion(matrix: GF2Matrix) -> tuple[int, ...]:
    """Qubits (1-based) whose weight-1 columns complete R to a basis.

    Greedy over ascending qubit index using an XOR basis of column vectors.
    """
    basis: list[int] = []  # vectors normalized to distinct leading bits

    def reduce(vec: int) -> int:
        for b in basis:
            vec = min(vec, vec ^ b)
        return vec

    def insert(vec: int) -> bool:
        vec = reduce(vec)
        if vec == 0:
            return False
        basis.append(vec)
        basis.sort(reverse=True)
        return True

    for j in range(matrix.cols):
        inserted = insert(matrix.column_int(j))
        if not inserted:
            raise NotSparseError("columns are dependent; padding undefined")
    added = []
    for row in range(matrix.rows):
        if insert(1 << row):
            added.append(row + 1)
    return tuple(added)


def classify(circuit: IqpCircuit) -> SparseClassification:
    matrix = incidence_matrix(circuit)
    col_rank = rank(matrix)
    if col_rank < matrix.cols:
        return SparseClassification(SparseKind.GENERAL, 0, ())
    if matrix.cols == matrix.rows:
        return SparseClassification(SparseKind.IFRB, 0, ())
    padding = _basis_completion(matrix)
    return SparseClassification(SparseKind.IB, len(padding), padding)


def padded_circuit(
    circuit: IqpCircuit, classification: SparseClassification | None = None
) -> IqpCircuit:
    """The circuit extended by theta=0 ancilla gates so that R is square invertible."""
    cls = classification or classify(circuit)
    if cls.kind is SparseKind.GENERAL:
        raise NotSparseError("circuit is neither IFRB nor IB")
    extra = tuple(gate([q], Angle.zero()) for q in cls.padding_qubits)
    return IqpCircuit(n=circuit.n, gates=circuit.gates + extra)


def renormalized_angles(circuit: IqpCircuit, s: Sequence[int]) -> tuple[Angle, ...]:
    """Angles theta_j + c_j pi/2 over the (padded) gate set, with R c = s."""
    bits = as_bits(s, circuit.n)
    padded = padded_circuit(circuit)
    matrix = incidence_matrix(padded)
    c = solve(matrix, bits)
    if c is None:
        raise NotSparseError("no renormalization vector; padding failed")
    return tuple(
        g.theta.plus_half_pi() if cj else g.theta for g, cj in zip(padded.gates, c)
    )


def sparse_probability(circuit: IqpCircuit, s: Sequence[int]) -> float:
    """P(s) = prod_j cos^2(renormalized theta_j), exact for IFRB/IB circuits.

    Factors multiply in canonical gate order so permuted circuits produce
    bitwise-identical probabilities.
    """
    padded = padded_circuit(circuit)
    shifted = renormalized_angles(circuit, s)
    prob = 1.0
    for j in padded.canonical_gate_order():
        prob *= shifted[j].cos() ** 2
    return prob


def _as_rng(rng: "np.random.Generator | int | None") -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_outcomes(
    circuit: IqpCircuit, count: int, rng: "np.random.Generator | int | None" = None
) -> np.ndarray:
    """count x n array of outcomes drawn exactly from the circuit distribution."""
    cls = classify(circuit)
    if cls.kind is SparseKind.GENERAL:
        raise NotSparseError("sampler requires an IFRB or IB circuit")
    generator = _as_rng(rng)
    m = len(circuit.gates)
    probs = np.array([g.theta.sin() ** 2 for g in circuit.gates])
    c = (generator.random((count, m)) < probs).astype(np.uint8)
    matrix = incidence_matrix(circuit)
    dense = np.array(matrix.to_dense(), dtype=np.uint8).reshape(circuit.n, m)
    return (c @ dense.T) % 2


def sparse_sample(
    circuit: IqpCircuit, rng: "np.random.Generator | int | None" = None
) -> OutcomeString:
    return tuple(int(b) for b in sample_outcomes(circuit, 1, rng)[0])


__all__ = [
    "SparseKind",
    "SparseClassification",
    "incidence_matrix",
    "classify",
    "padded_circuit",
    "renormalized_angles",
    "sparse_probability",
    "sample_outcomes",
    "sparse_sample",
]
