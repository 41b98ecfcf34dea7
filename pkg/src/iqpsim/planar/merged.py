"""The merged graph behind marginal probabilities.

Marginalizing an outcome distribution over the unmeasured qubits is the same
as evaluating a single partition function on a *merged* graph: the measured
region, a sign-flipped mirror copy of it, and the shared boundary vertices
gluing the two.  Field bits are duplicated onto both copies and set to zero
on the boundary, weights are negated on the mirror copy, and the marginal is

    P = 2^(-2 |measured| - |boundary|) * |Z(merged)|.

The |Z| exponent and the prefactor here follow from the square-root-of-joint
identity (the merged graph has 2|M_A| + |boundary| sites) and are pinned
against the dense oracle by the regression tests.

The merged rotation system glues the mirror copy across the boundary: every
mirrored vertex takes the reversed rotation, and a boundary vertex lists its
surviving original edges followed by the mirrored ones in reverse.  That is
planar exactly when the measured region grows as a connected patch of the
embedding; the Euler verifier runs on the result and a violation raises
MergeError.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..angles import Angle
from ..errors import EmbeddingError, MergeError
from .embedding import PlanarEmbedding
from .instance import PlanarIsingInstance


@dataclass(frozen=True)
class MergedGraph:
    instance: PlanarIsingInstance
    field_bits: tuple[int, ...]
    measured_count: int
    boundary_count: int
    site_origin: tuple[tuple[str, int], ...]
    edge_origin: tuple[tuple[str, int], ...]

    @property
    def log2_prefactor(self) -> int:
        """P = 2^(-log2_prefactor) * |Z(merged)|."""
        return 2 * self.measured_count + self.boundary_count


def _check_measured_connected(
    instance: PlanarIsingInstance, measured: Sequence[int]
) -> None:
    """Within each original component, the measured set must be connected
    through gates whose endpoints are both measured."""
    measured_set = set(measured)
    adjacency: dict[int, list[int]] = {v: [] for v in measured_set}
    for u, v in instance.edges:
        if u in measured_set and v in measured_set:
            adjacency[u].append(v)
            adjacency[v].append(u)
    for comp in instance.components():
        comp_measured = [v for v in comp if v in measured_set]
        if len(comp_measured) <= 1:
            continue
        seen = {comp_measured[0]}
        stack = [comp_measured[0]]
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(comp_measured):
            raise MergeError(
                "measured set is not connected inside its component; reorder measurements"
            )


def _aligned_surviving(rotation: Sequence[int], kept: "set[int]") -> list[int]:
    """Kept edges of a boundary vertex, rotated to start right after the
    dropped arc.

    The mirror block is appended after the surviving arc, so it must occupy
    the cyclic gap where the unmeasured-side edges were; starting the arc at
    the first kept edge following a dropped one puts it there.  When nothing
    is dropped any insertion point is attempted and the Euler check decides.
    """
    d = len(rotation)
    start = 0
    for i in range(d):
        if rotation[i] in kept and rotation[i - 1] not in kept:
            start = i
            break
    return [e for e in rotation[start:] + rotation[:start] if e in kept]


def merge_for_marginal(
    instance: PlanarIsingInstance,
    measured: Sequence[int],
    bits: Sequence[int],
) -> MergedGraph:
    """Build the merged graph for measured sites (0-based) with outcome bits."""
    measured = list(measured)
    if len(set(measured)) != len(measured):
        raise ValueError("duplicate measured sites")
    if len(bits) != len(measured):
        raise ValueError("one outcome bit per measured site required")
    _check_measured_connected(instance, measured)

    measured_set = set(measured)
    base_id = {v: i for i, v in enumerate(sorted(measured_set))}
    m = len(base_id)
    mirror_id = {v: m + i for v, i in base_id.items()}

    gate_ids = [
        e
        for e, (u, v) in enumerate(instance.edges)
        if u in measured_set or v in measured_set
    ]
    boundary = sorted(
        {
            w
            for e in gate_ids
            for w in instance.edges[e]
            if w not in measured_set
        }
    )
    shared_id = {w: 2 * m + i for i, w in enumerate(boundary)}

    def base_site(v: int) -> int:
        return base_id[v] if v in base_id else shared_id[v]

    def mirror_site(v: int) -> int:
        return mirror_id[v] if v in mirror_id else shared_id[v]

    edges: list[tuple[int, int]] = []
    weights: list[Angle] = []
    edge_origin: list[tuple[str, int]] = []
    base_edge = {}
    mirror_edge = {}
    for e in gate_ids:
        u, v = instance.edges[e]
        base_edge[e] = len(edges)
        edges.append((base_site(u), base_site(v)))
        weights.append(instance.weights[e])
        edge_origin.append(("base", e))
    for e in gate_ids:
        u, v = instance.edges[e]
        mirror_edge[e] = len(edges)
        edges.append((mirror_site(u), mirror_site(v)))
        weights.append(instance.weights[e].negated())
        edge_origin.append(("mirror", e))

    in_merge = set(gate_ids)
    n_merged = 2 * m + len(boundary)
    rotations: list[tuple[int, ...]] = [()] * n_merged
    for v, idx in base_id.items():
        rot = [base_edge[e] for e in instance.embedding.rotations[v]]
        rotations[idx] = tuple(rot)
    for v, idx in mirror_id.items():
        rot = [mirror_edge[e] for e in reversed(instance.embedding.rotations[v])]
        rotations[idx] = tuple(rot)
    for w in boundary:
        surviving = _aligned_surviving(instance.embedding.rotations[w], in_merge)
        rot = [base_edge[e] for e in surviving]
        rot.extend(mirror_edge[e] for e in reversed(surviving))
        rotations[shared_id[w]] = tuple(rot)

    try:
        embedding = PlanarEmbedding(
            n_vertices=n_merged,
            edges=tuple(edges),
            rotations=tuple(rotations),
        )
        embedding.require_planar()
    except EmbeddingError as exc:
        raise MergeError(f"merged embedding is not planar: {exc}") from exc

    merged_instance = PlanarIsingInstance(
        n_sites=n_merged,
        edges=tuple(edges),
        weights=tuple(weights),
        embedding=embedding,
    )
    bit_of = {v: int(b) for v, b in zip(measured, bits)}
    field_bits = [0] * n_merged
    for v, idx in base_id.items():
        field_bits[idx] = bit_of[v]
        field_bits[mirror_id[v]] = bit_of[v]
    site_origin = [("", 0)] * n_merged
    for v, idx in base_id.items():
        site_origin[idx] = ("base", v)
        site_origin[mirror_id[v]] = ("mirror", v)
    for w in boundary:
        site_origin[shared_id[w]] = ("boundary", w)

    return MergedGraph(
        instance=merged_instance,
        field_bits=tuple(field_bits),
        measured_count=m,
        boundary_count=len(boundary),
        site_origin=tuple(site_origin),
        edge_origin=tuple(edge_origin),
    )


__all__ = ["MergedGraph", "merge_for_marginal"]
