"""Core problem representations: circuits, bipartite interaction graphs, outcomes.

Conventions used across the whole package:

* Qubits are numbered 1..n in every public signature (matching the usual
  physics convention); internal arrays are 0-based.  This is the only place
  the shift is documented -- everything else follows it.
* An outcome string is a plain tuple of 0/1 ints of length n, qubit 1 first.
  When outcomes are packed into integers, qubit 1 is the most significant
  bit, so packed order matches the printed order.
* Gate order never affects probabilities (the gates commute).  Evaluators
  that sum floating-point contributions first sort gates by a canonical key
  so that permuted circuits produce bitwise-identical numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .angles import Angle, as_angle
from .errors import LengthMismatchError

OutcomeString = tuple[int, ...]


@dataclass(frozen=True)
class GateTerm:
    """A commuting gate exp(i * theta * prod_{k in qubits} Z_k)."""

    qubits: frozenset[int]
    theta: Angle

    def __post_init__(self) -> None:
        if not self.qubits:
            raise ValueError("gate needs a nonempty qubit subset")
        if any(q < 1 for q in self.qubits):
            raise ValueError("qubit indices are 1-based positive integers")


def gate(qubits: Iterable[int], theta: "Angle | float | int") -> GateTerm:
    """Build a GateTerm, rejecting duplicate indices in the input."""
    qubit_list = list(qubits)
    if len(qubit_list) != len(set(qubit_list)):
        raise ValueError(f"duplicate qubit indices in gate: {qubit_list}")
    return GateTerm(qubits=frozenset(qubit_list), theta=as_angle(theta))


@dataclass(frozen=True)
class IqpCircuit:
    """n qubits plus an ordered list of commuting gates."""

    n: int
    gates: tuple[GateTerm, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("qubit count must be positive")
        for g in self.gates:
            if any(q > self.n for q in g.qubits):
                raise ValueError(f"gate {sorted(g.qubits)} exceeds qubit count {self.n}")

    @staticmethod
    def build(n: int, gates: Iterable[tuple[Iterable[int], "Angle | float | int"]]) -> "IqpCircuit":
        return IqpCircuit(n=n, gates=tuple(gate(q, t) for q, t in gates))

    def canonical_gate_order(self) -> tuple[int, ...]:
        """Gate indices sorted by (sorted qubit subset, angle key).

        Evaluating in this order makes every downstream sum independent of
        the order gates were listed in, bit for bit.
        """
        keys = [
            (tuple(sorted(g.qubits)), g.theta.sort_key(), j)
            for j, g in enumerate(self.gates)
        ]
        return tuple(j for _, _, j in sorted(keys))


@dataclass(frozen=True)
class BipartiteInteractionGraph:
    """G(V_A + U_B, E): one V_A vertex per qubit, one weighted U_B vertex per gate."""

    n_qubits: int
    neighborhoods: tuple[frozenset[int], ...]
    weights: tuple[Angle, ...]

    def __post_init__(self) -> None:
        if len(self.neighborhoods) != len(self.weights):
            raise ValueError("one weight per U_B vertex required")

    @property
    def n_gates(self) -> int:
        return len(self.neighborhoods)

    def qubit_neighborhood(self, qubit: int) -> tuple[int, ...]:
        """Gate indices (0-based) adjacent to a 1-based qubit."""
        return tuple(j for j, nb in enumerate(self.neighborhoods) if qubit in nb)


def circuit_to_graph(circuit: IqpCircuit) -> BipartiteInteractionGraph:
    return BipartiteInteractionGraph(
        n_qubits=circuit.n,
        neighborhoods=tuple(g.qubits for g in circuit.gates),
        weights=tuple(g.theta for g in circuit.gates),
    )


def graph_to_circuit(graph: BipartiteInteractionGraph) -> IqpCircuit:
    return IqpCircuit(
        n=graph.n_qubits,
        gates=tuple(
            GateTerm(qubits=nb, theta=w)
            for nb, w in zip(graph.neighborhoods, graph.weights)
        ),
    )


def as_bits(bits: Sequence[int], expected_len: int | None = None) -> OutcomeString:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    if expected_len is not None and len(out) != expected_len:
        raise LengthMismatchError(f"expected {expected_len} bits, got {len(out)}")
    return out


def pack_bits(bits: Sequence[int]) -> int:
    """Pack an outcome into an int, qubit 1 as the most significant bit."""
    value = 0
    for b in bits:
        value = (value << 1) | (b & 1)
    return value


def unpack_bits(value: int, n: int) -> OutcomeString:
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def mbiqp_to_iqp_outcome(
    mv: Sequence[int], mu: Sequence[int], graph: BipartiteInteractionGraph
) -> OutcomeString:
    """s_i = m_{v_i} xor (xor of m_{u_j} over gates j touching qubit i)."""
    mv = as_bits(mv, graph.n_qubits)
    mu = as_bits(mu, graph.n_gates)
    out = list(mv)
    for j, nb in enumerate(graph.neighborhoods):
        if mu[j]:
            for q in nb:
                out[q - 1] ^= 1
    return tuple(out)


def iqp_to_mbiqp_outcome(
    s: Sequence[int], mu: Sequence[int], graph: BipartiteInteractionGraph
) -> tuple[OutcomeString, OutcomeString]:
    """Inverse direction; the same XOR, so it round-trips with the forward map."""
    s = as_bits(s, graph.n_qubits)
    mu = as_bits(mu, graph.n_gates)
    return mbiqp_to_iqp_outcome(s, mu, graph), mu
