"""Shared test fixtures and independent oracles.

The graph-state projector oracle here evaluates MBIQP probabilities straight
from the definition (CZ circuit on |+> states, explicit measurement bras),
so it shares no code with the production evaluators.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from iqpsim.angles import Angle
from iqpsim.circuit import BipartiteInteractionGraph, IqpCircuit
from iqpsim.generators import grid_instance
from iqpsim.planar.embedding import PlanarEmbedding
from iqpsim.planar.instance import PlanarIsingInstance


def random_circuit(rng: np.random.Generator, n: int, n_gates: int, max_arity: int = 3) -> IqpCircuit:
    gates = []
    for _ in range(n_gates):
        size = int(rng.integers(1, min(max_arity, n) + 1))
        qubits = rng.choice(n, size=size, replace=False) + 1
        gates.append((tuple(int(q) for q in qubits), Angle.from_radians(float(rng.uniform(0, 2 * math.pi)))))
    return IqpCircuit.build(n, gates)


def worked_ifrb_circuit(t1=0.3, t2=0.5, t3=0.7) -> IqpCircuit:
    """The worked IFRB example: gates Z1Z2, Z2, Z1Z2Z3 in this order."""
    return IqpCircuit.build(3, [((1, 2), t1), ((2,), t2), ((1, 2, 3), t3)])


def worked_ib_circuit(t1=0.3, t2=0.7) -> IqpCircuit:
    """Independent but non-full-rank: drop the single-qubit gate."""
    return IqpCircuit.build(3, [((1, 2), t1), ((1, 2, 3), t2)])


def graph_state_vector(graph: BipartiteInteractionGraph) -> np.ndarray:
    """|G> on n + m qubits; V_A qubits first, then U_B, qubit 1 = MSB."""
    n = graph.n_qubits
    m = graph.n_gates
    total = n + m
    dim = 1 << total
    state = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    z = np.arange(dim, dtype=np.uint64)
    for j, nb in enumerate(graph.neighborhoods):
        u_bit = (z >> np.uint64(total - (n + j + 1))) & np.uint64(1)
        for q in nb:
            v_bit = (z >> np.uint64(total - q)) & np.uint64(1)
            state = np.where((u_bit & v_bit).astype(bool), -state, state)
    return state


def mbiqp_probability(
    graph: BipartiteInteractionGraph, mv, mu
) -> float:
    """P_MBIQP from the definition: projector overlap with the graph state."""
    n, m = graph.n_qubits, graph.n_gates
    state = graph_state_vector(graph)
    bras = []
    for i in range(n):
        sign = -1.0 if mv[i] else 1.0
        bras.append(np.array([1.0, sign]) / math.sqrt(2.0))
    for j in range(m):
        theta = graph.weights[j].rad
        ket0 = np.array([math.cos(theta), -1j * math.sin(theta)])
        ket = ket0[::-1] if mu[j] else ket0
        bras.append(ket.conj())
    bra = bras[0]
    for piece in bras[1:]:
        bra = np.kron(bra, piece)
    return float(abs(np.dot(bra, state)) ** 2)


def random_connected_planar(
    rng: np.random.Generator, rows: int, cols: int, drop: float = 0.25
) -> PlanarIsingInstance:
    """A connected random subgraph of a grid, with its restricted embedding."""
    circuit, embedding = grid_instance(
        rows, cols, [Angle.from_radians(float(t)) for t in rng.uniform(0, 2 * math.pi, 2 * rows * cols - rows - cols)]
    )
    n = circuit.n
    edges = list(embedding.edges)
    while True:
        keep = [e for e in range(len(edges)) if rng.random() > drop]
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in keep:
            u, v = edges[e]
            parent[find(u)] = find(v)
        if len({find(v) for v in range(n)}) == 1:
            break
    remap = {e: i for i, e in enumerate(keep)}
    sub_edges = tuple(edges[e] for e in keep)
    sub_rot = tuple(
        tuple(remap[e] for e in rot if e in remap) for rot in embedding.rotations
    )
    sub_embedding = PlanarEmbedding(n_vertices=n, edges=sub_edges, rotations=sub_rot)
    gates = tuple(circuit.gates[e] for e in keep)
    sub_circuit = IqpCircuit(n=n, gates=gates)
    return PlanarIsingInstance.from_circuit(sub_circuit, sub_embedding)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240801)
