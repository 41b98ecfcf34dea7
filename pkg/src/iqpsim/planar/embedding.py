"""Combinatorial planar embeddings (rotation systems) and Kasteleyn orientations.

An embedding stores, for every vertex, the cyclic order of its incident
edges.  Faces are traced with darts: the dart (v, e) points away from v
along edge e, and the next dart of a face is the rotation successor of e at
the far endpoint.  With that convention each face keeps its region on a
fixed side, the face count satisfies Euler's formula exactly when the
rotation system is genus zero, and no geometric coordinates are ever needed.

Self-loops are not supported (no gate acts twice on one qubit); parallel
edges are fine and occur naturally for duplicated gates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from ..errors import EmbeddingError

Dart = tuple[int, int]  # (vertex, edge id)


@dataclass(frozen=True)
class PlanarEmbedding:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    rotations: tuple[tuple[int, ...], ...]
    outer_dart: Dart | None = None

    def __post_init__(self) -> None:
        if len(self.rotations) != self.n_vertices:
            raise EmbeddingError("one rotation per vertex required")
        seen: dict[Dart, bool] = {}
        for e, (u, v) in enumerate(self.edges):
            if u == v:
                raise EmbeddingError(f"self-loop on vertex {u} unsupported")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise EmbeddingError(f"edge {e} endpoint out of range")
        for v, rot in enumerate(self.rotations):
            for e in rot:
                if not (0 <= e < len(self.edges)) or v not in self.edges[e]:
                    raise EmbeddingError(f"rotation of vertex {v} lists foreign edge {e}")
                if (v, e) in seen:
                    raise EmbeddingError(f"edge {e} repeated in rotation of vertex {v}")
                seen[(v, e)] = True
        for e, (u, v) in enumerate(self.edges):
            if (u, e) not in seen or (v, e) not in seen:
                raise EmbeddingError(f"edge {e} missing from an endpoint rotation")

    def other_end(self, e: int, v: int) -> int:
        u, w = self.edges[e]
        return w if v == u else u

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def _successor(self) -> dict[Dart, Dart]:
        nxt: dict[Dart, Dart] = {}
        for v, rot in enumerate(self.rotations):
            for idx, e in enumerate(rot):
                nxt[(v, e)] = (v, rot[(idx + 1) % len(rot)])
        return nxt

    def faces(self) -> tuple[tuple[Dart, ...], ...]:
        """All faces as dart cycles; every dart belongs to exactly one face."""
        succ = self._successor()
        remaining = set(succ)
        out: list[tuple[Dart, ...]] = []
        for start in sorted(succ):
            if start not in remaining:
                continue
            cycle = []
            d = start
            while True:
                cycle.append(d)
                remaining.discard(d)
                v, e = d
                d = succ[(self.other_end(e, v), e)]
                if d == start:
                    break
            out.append(tuple(cycle))
        return tuple(out)

    def components(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen = [False] * self.n_vertices
        comps = []
        for v0 in range(self.n_vertices):
            if seen[v0]:
                continue
            stack, comp = [v0], []
            seen[v0] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def genus(self) -> int:
        """Total genus over components; 0 iff the rotation system is planar."""
        comps = self.components()
        comp_of = {}
        for ci, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = ci
        v_count = [len(c) for c in comps]
        e_count = [0] * len(comps)
        for u, _v in self.edges:
            e_count[comp_of[u]] += 1
        f_count = [0] * len(comps)
        for f in self.faces():
            f_count[comp_of[f[0][0]]] += 1
        for ci in range(len(comps)):
            if v_count[ci] == 1 and e_count[ci] == 0:
                f_count[ci] = 1  # isolated vertex: one face, genus 0
        total = 0
        for ci in range(len(comps)):
            euler = v_count[ci] - e_count[ci] + f_count[ci]
            if (2 - euler) % 2:
                raise EmbeddingError("odd Euler defect; rotation system corrupt")
            total += (2 - euler) // 2
        return total

    def require_planar(self) -> None:
        if self.genus() != 0:
            raise EmbeddingError("rotation system is not genus zero")


def _face_table(embedding: PlanarEmbedding) -> tuple[tuple[tuple[Dart, ...], ...], dict[Dart, int]]:
    faces = embedding.faces()
    face_of: dict[Dart, int] = {}
    for fi, f in enumerate(faces):
        for d in f:
            face_of[d] = fi
    return faces, face_of


def _root_faces(
    embedding: PlanarEmbedding, faces: Sequence[tuple[Dart, ...]], face_of: dict[Dart, int]
) -> set[int]:
    """One exempt face per component: the designated outer face where known,
    otherwise the longest face (lowest index on ties).

    Any single face per component may play the unbounded role, so the
    fallback choice never affects correctness, only which face is exempt.
    """
    comps = embedding.components()
    comp_of_vertex = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of_vertex[v] = ci
    roots: dict[int, int] = {}
    for fi, f in enumerate(faces):
        ci = comp_of_vertex[f[0][0]]
        if ci not in roots or len(f) > len(faces[roots[ci]]):
            roots[ci] = fi
    if embedding.outer_dart is not None:
        if embedding.outer_dart not in face_of:
            raise EmbeddingError(f"outer dart {embedding.outer_dart} not in any face")
        fi = face_of[embedding.outer_dart]
        roots[comp_of_vertex[faces[fi][0][0]]] = fi
    return set(roots.values())


def kasteleyn_orient(embedding: PlanarEmbedding) -> tuple[int, ...]:
    """Edge orientations making every non-exempt face odd.

    Returns one flag per edge: 0 orients edges[e] = (u, v) as u -> v, 1 as
    v -> u.  A spanning forest is oriented arbitrarily, then co-tree edges
    are fixed walking the dual spanning tree from the leaves inward so each
    bounded face ends up with an odd number of edges directed against its
    traversal.
    """
    embedding.require_planar()
    faces, face_of = _face_table(embedding)
    roots = _root_faces(embedding, faces, face_of)

    # spanning forest over vertices
    n = embedding.n_vertices
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(embedding.edges):
        adjacency[u].append((v, e))
        adjacency[v].append((u, e))
    in_tree = [False] * len(embedding.edges)
    seen = [False] * n
    for v0 in range(n):
        if seen[v0]:
            continue
        seen[v0] = True
        stack = [v0]
        while stack:
            v = stack.pop()
            for w, e in sorted(adjacency[v]):
                if not seen[w]:
                    seen[w] = True
                    in_tree[e] = True
                    stack.append(w)

    orientation = [0] * len(embedding.edges)  # tree edges: as listed

    # dual forest over faces through co-tree edges
    dual_adj: dict[int, list[tuple[int, int]]] = {fi: [] for fi in range(len(faces))}
    for e, (u, v) in enumerate(embedding.edges):
        if in_tree[e]:
            continue
        f1, f2 = face_of[(u, e)], face_of[(v, e)]
        dual_adj[f1].append((f2, e))
        dual_adj[f2].append((f1, e))

    parent_edge: dict[int, int] = {}
    order: list[int] = []
    visited = set(roots)
    queue = deque(sorted(roots))
    while queue:
        fi = queue.popleft()
        order.append(fi)
        for fj, e in sorted(dual_adj[fi]):
            if fj not in visited:
                visited.add(fj)
                parent_edge[fj] = e
                queue.append(fj)
    if len(visited) != len(faces):
        raise EmbeddingError("dual forest construction failed")

    for fi in reversed(order):
        if fi in roots:
            continue
        e_fix = parent_edge[fi]
        against = 0
        for v, e in faces[fi]:
            if e == e_fix:
                continue
            u0, _ = embedding.edges[e]
            points_with = (v == u0) == (orientation[e] == 0)
            if not points_with:
                against += 1
        # choose the free edge so the face has an odd count of against-edges
        v_fix = next(v for v, e in faces[fi] if e == e_fix)
        u0, _ = embedding.edges[e_fix]
        # orientation flag that would make e_fix point with the traversal at this face
        with_flag = 0 if v_fix == u0 else 1
        orientation[e_fix] = with_flag if against % 2 == 1 else 1 - with_flag
    return tuple(orientation)


def verify_kasteleyn(embedding: PlanarEmbedding, orientation: Sequence[int]) -> bool:
    """Check that every face except one per component is oddly oriented."""
    faces, face_of = _face_table(embedding)
    roots = _root_faces(embedding, faces, face_of)
    for fi, f in enumerate(faces):
        if fi in roots:
            continue
        against = 0
        for v, e in f:
            u0, _ = embedding.edges[e]
            points_with = (v == u0) == (orientation[e] == 0)
            if not points_with:
                against += 1
        if against % 2 != 1:
            return False
    return True


def face_parities(embedding: PlanarEmbedding, orientation: Sequence[int]) -> list[int]:
    """Against-traversal edge counts per face (diagnostic helper)."""
    out = []
    for f in embedding.faces():
        against = 0
        for v, e in f:
            u0, _ = embedding.edges[e]
            if (v == u0) != (orientation[e] == 0):
                against += 1
        out.append(against)
    return out
