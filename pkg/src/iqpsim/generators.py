"""Lattice generators emitting circuits together with rotation systems.

Grids are the workhorse planar instances; users should not have to write
rotation systems by hand.  Vertex (r, c) of an R x C grid is qubit
r*C + c + 1; edges are emitted row-major, east edge before south edge, and
each vertex's rotation lists its incident edges counterclockwise in the
plane (east, north, west, south with row numbers growing downward).
"""

from __future__ import annotations

from typing import Sequence

from .angles import Angle, as_angle
from .circuit import IqpCircuit, gate
from .planar.embedding import PlanarEmbedding
from .planar.instance import PlanarIsingInstance


def grid_instance(
    rows: int, cols: int, theta: "Angle | float | Sequence[Angle | float]"
) -> tuple[IqpCircuit, PlanarEmbedding]:
    """R x C grid circuit with one two-qubit gate per lattice edge."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    n = rows * cols

    def site(r: int, c: int) -> int:
        return r * cols + c

    edges: list[tuple[int, int]] = []
    east: dict[tuple[int, int], int] = {}
    south: dict[tuple[int, int], int] = {}
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                east[(r, c)] = len(edges)
                edges.append((site(r, c), site(r, c + 1)))
            if r + 1 < rows:
                south[(r, c)] = len(edges)
                edges.append((site(r, c), site(r + 1, c)))

    if isinstance(theta, (Angle, float, int)):
        thetas = [as_angle(theta)] * len(edges)
    else:
        thetas = [as_angle(t) for t in theta]
        if len(thetas) != len(edges):
            raise ValueError(f"{rows}x{cols} grid has {len(edges)} edges")

    rotations: list[tuple[int, ...]] = []
    for r in range(rows):
        for c in range(cols):
            rot = []
            if c + 1 < cols:
                rot.append(east[(r, c)])  # east
            if r - 1 >= 0:
                rot.append(south[(r - 1, c)])  # north
            if c - 1 >= 0:
                rot.append(east[(r, c - 1)])  # west
            if r + 1 < rows:
                rot.append(south[(r, c)])  # south
            rotations.append(tuple(rot))

    embedding = PlanarEmbedding(
        n_vertices=n, edges=tuple(edges), rotations=tuple(rotations)
    )
    faces = embedding.faces()
    if faces:
        outer = max(range(len(faces)), key=lambda fi: (len(faces[fi]), -fi))
        embedding = PlanarEmbedding(
            n_vertices=n,
            edges=tuple(edges),
            rotations=tuple(rotations),
            outer_dart=faces[outer][0],
        )
    circuit = IqpCircuit(
        n=n,
        gates=tuple(
            gate((u + 1, v + 1), t) for (u, v), t in zip(edges, thetas)
        ),
    )
    return circuit, embedding


def grid_planar_instance(
    rows: int, cols: int, theta: "Angle | float | Sequence[Angle | float]"
) -> PlanarIsingInstance:
    circuit, embedding = grid_instance(rows, cols, theta)
    return PlanarIsingInstance.from_circuit(circuit, embedding)


__all__ = ["grid_instance", "grid_planar_instance"]
