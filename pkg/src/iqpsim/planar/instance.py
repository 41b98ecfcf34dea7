"""Interaction-graph view of a planar two-body circuit."""

from __future__ import annotations

from dataclasses import dataclass

from ..angles import Angle
from ..circuit import IqpCircuit
from ..errors import NotTwoBodyError
from .embedding import PlanarEmbedding


@dataclass(frozen=True)
class PlanarIsingInstance:
    """Sites 0..n-1 (qubit i is site i-1), one weighted edge per two-qubit gate.

    The embedding's edge ids coincide with gate ids; parallel edges from
    duplicated gates are kept as-is (the even-subgraph expansion handles
    multigraphs exactly).
    """

    n_sites: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[Angle, ...]
    embedding: PlanarEmbedding

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.weights):
            raise ValueError("one weight per edge required")
        if self.embedding.n_vertices != self.n_sites:
            raise ValueError("embedding vertex count mismatch")
        if len(self.embedding.edges) != len(self.edges):
            raise ValueError("embedding edge count mismatch")
        for e, (u, v) in enumerate(self.edges):
            if {u, v} != set(self.embedding.edges[e]):
                raise ValueError(f"embedding edge {e} does not match gate endpoints")

    @staticmethod
    def from_circuit(circuit: IqpCircuit, embedding: PlanarEmbedding) -> "PlanarIsingInstance":
        edges = []
        for g in circuit.gates:
            if len(g.qubits) != 2:
                raise NotTwoBodyError(
                    f"gate on {sorted(g.qubits)} is not two-qubit; planar engine needs |S_j| = 2"
                )
            u, v = sorted(g.qubits)
            edges.append((u - 1, v - 1))
        return PlanarIsingInstance(
            n_sites=circuit.n,
            edges=tuple(edges),
            weights=tuple(g.theta for g in circuit.gates),
            embedding=embedding,
        )

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per site: (neighbor site, edge id), in ascending deterministic order."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_sites)]
        for e, (u, v) in enumerate(self.edges):
            out[u].append((v, e))
            out[v].append((u, e))
        for lst in out:
            lst.sort()
        return out

    def components(self) -> list[list[int]]:
        adjacency = self.adjacency()
        seen = [False] * self.n_sites
        comps = []
        for v0 in range(self.n_sites):
            if seen[v0]:
                continue
            seen[v0] = True
            stack, comp = [v0], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w, _e in adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps
