"""Fisher decoration: planar Ising partition functions as matching sums.

The high-temperature expansion of a two-body imaginary-coupling Ising model

    Z = 2^|V| * sum over even edge subsets E' of
        prod_{e in E'} (i sin theta_e) * prod_{e not in E'} cos theta_e

is evaluated by mapping even subsets to perfect matchings of a decorated
planar graph and taking a Pfaffian of its Kasteleyn-oriented adjacency
matrix.  The construction:

* vertices of degree >= 4 are split into chains of degree-3 nodes joined by
  equality edges (occupied and unoccupied factors both 1), which is exact in
  the even-subgraph sum and preserves planarity when the chain follows the
  rotation order;
* every angle-carrying edge (u, v) is subdivided u - x - y - v with weights
  (cos theta, i sin theta, 1): a perfect matching picks either the two outer
  stubs (edge unoccupied, factor cos) or the middle (edge occupied, factor
  i sin), so theta = pi/2 costs nothing instead of hitting a tan pole;
* each remaining vertex becomes a parity gadget (single node / stub pair /
  Fisher triangle) whose internal matching completes uniquely exactly when
  the number of occupied incident edges is even.

Decoration happens per connected component.  A rotation system fixes an
orientation of the surface only up to mirror image per component, and the
gadget patterns are chiral, so a component whose decoration fails the Euler
check is retried with its rotations reversed; exactly one handedness works
for a genus-zero component.

All matchings carry the same combinatorial sign, which is calibrated on the
all-unoccupied reference matching without touching weights, so zero-weight
edges (theta = pi/2) cannot break the calibration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from ..errors import EmbeddingError
from .embedding import PlanarEmbedding, kasteleyn_orient
from .pfaffian import pfaffian_phase_logabs

# Dense LAPACK beats sparse LU below roughly this many decorated nodes.
_DENSE_CUTOFF = 600


@dataclass(frozen=True)
class DecoratedSystem:
    """Kasteleyn-ready decorated graph for one connected interaction graph."""

    n_nodes: int
    edge_ends: tuple[tuple[int, int], ...]
    edge_weights: tuple[complex, ...]
    rotations: tuple[tuple[int, ...], ...]
    base_matching: tuple[int, ...]
    orientation: tuple[int, ...]
    base_sign: int

    def matrix_dense(self) -> np.ndarray:
        k = np.zeros((self.n_nodes, self.n_nodes), dtype=np.complex128)
        for (a, b), w, flag in zip(self.edge_ends, self.edge_weights, self.orientation):
            if flag:
                a, b = b, a
            k[a, b] += w
            k[b, a] -= w
        return k

    def matrix_sparse(self) -> csc_matrix:
        m = len(self.edge_ends)
        ends = np.asarray(self.edge_ends, dtype=np.int32)
        flags = np.asarray(self.orientation, dtype=bool)
        heads = np.where(flags, ends[:, 1], ends[:, 0])
        tails = np.where(flags, ends[:, 0], ends[:, 1])
        weights = np.asarray(self.edge_weights, dtype=np.complex128)
        rows = np.concatenate([heads, tails])
        cols = np.concatenate([tails, heads])
        data = np.concatenate([weights, -weights])
        return csc_matrix((data, (rows, cols)), shape=(self.n_nodes, self.n_nodes))

    def matching_sum_phase_logabs(self) -> tuple[complex, float]:
        """(phase, log magnitude) of the signed sum over perfect matchings."""
        if self.n_nodes == 0:
            return 1.0 + 0.0j, 0.0
        phase, logabs = pfaffian_phase_logabs(self.matrix_dense())
        return self.base_sign * phase, logabs

    def matching_sum(self) -> complex:
        phase, logabs = self.matching_sum_phase_logabs()
        if logabs == -math.inf:
            return 0.0 + 0.0j
        return phase * math.exp(logabs)

    def logabs_matching_sum(self) -> float:
        """log |sum over matchings| via |det K|^(1/2); -inf when the sum is 0."""
        if self.n_nodes == 0:
            return 0.0
        if self.n_nodes < _DENSE_CUTOFF:
            _, logdet = np.linalg.slogdet(self.matrix_dense())
            return 0.5 * float(logdet)
        try:
            lu = splu(self.matrix_sparse(), permc_spec="COLAMD")
        except RuntimeError:
            return -math.inf
        diag = np.abs(lu.U.diagonal())
        if np.any(diag == 0.0) or not np.all(np.isfinite(diag)):
            return -math.inf
        return 0.5 * float(np.log(diag).sum())


@dataclass(frozen=True)
class DecoratedComponent:
    """One connected component: its site count and decorated system."""

    sites: int
    system: DecoratedSystem


def _permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _base_matching_sign(
    edge_ends: Sequence[tuple[int, int]],
    orientation: Sequence[int],
    matching: Sequence[int],
    n_nodes: int,
) -> int:
    """Sign the reference matching carries inside the Pfaffian expansion."""
    pairs = []
    orient_sign = 1
    for e in matching:
        a, b = edge_ends[e]
        lo, hi = (a, b) if a < b else (b, a)
        directed_from = edge_ends[e][1] if orientation[e] else edge_ends[e][0]
        if directed_from != lo:
            orient_sign = -orient_sign
        pairs.append((lo, hi))
    pairs.sort()
    flat = [idx for pair in pairs for idx in pair]
    if len(flat) != n_nodes:
        raise EmbeddingError("reference matching does not cover the decorated graph")
    return _permutation_sign(flat) * orient_sign


def _split_high_degree(
    n_sites: int,
    edges: Sequence[tuple[int, int]],
    rotations: Sequence[Sequence[int]],
) -> tuple[int, list[tuple[int, int]], int, list[list[int]]]:
    """Split degree >= 4 vertices into degree-3 chains joined by equality edges.

    Returns (vertex count, edge list, original edge count, rotations); edges
    with id >= the original count are the new equality edges.
    """
    side_node: dict[tuple[int, int], int] = {}
    new_rotations: list[list[int]] = []
    eq_edges: list[tuple[int, int]] = []
    edge_count = len(edges)

    def alloc(rot: list[int]) -> int:
        new_rotations.append(rot)
        return len(new_rotations) - 1

    for v in range(n_sites):
        rot = list(rotations[v])
        d = len(rot)
        if d <= 3:
            node = alloc(rot)
            for e in rot:
                side_node[(v, e)] = node
            continue
        chain_len = d - 2
        eq_ids = [edge_count + len(eq_edges) + t for t in range(chain_len - 1)]
        chain_nodes = []
        for t in range(chain_len):
            if t == 0:
                node_rot = [rot[0], rot[1], eq_ids[0]]
                legs = rot[:2]
            elif t == chain_len - 1:
                node_rot = [eq_ids[t - 1], rot[d - 2], rot[d - 1]]
                legs = rot[d - 2 :]
            else:
                node_rot = [eq_ids[t - 1], rot[t + 1], eq_ids[t]]
                legs = [rot[t + 1]]
            node = alloc(node_rot)
            chain_nodes.append(node)
            for e in legs:
                side_node[(v, e)] = node
        for t in range(chain_len - 1):
            eq_edges.append((chain_nodes[t], chain_nodes[t + 1]))

    out_edges = [
        (side_node[(u, e)], side_node[(v, e)]) for e, (u, v) in enumerate(edges)
    ]
    out_edges.extend(eq_edges)
    return len(new_rotations), out_edges, edge_count, new_rotations


def _decorate_connected(
    n_sites: int,
    edges: Sequence[tuple[int, int]],
    unoccupied: Sequence[float],
    occupied: Sequence[complex],
    rotations: Sequence[Sequence[int]],
) -> DecoratedSystem:
    n_split, split_edges, n_orig, split_rot = _split_high_degree(n_sites, edges, rotations)
    unocc = list(unoccupied) + [1.0] * (len(split_edges) - n_orig)
    occ = list(occupied) + [1.0 + 0.0j] * (len(split_edges) - n_orig)

    node_count = 0
    leg_node: dict[tuple[int, int], int] = {}
    gadget_internal: list[tuple[int, int]] = []
    gadget_rot_plan: list[tuple[int, list[tuple[str, int]]]] = []

    def new_node() -> int:
        nonlocal node_count
        node_count += 1
        return node_count - 1

    for w in range(n_split):
        rot = split_rot[w]
        d = len(rot)
        if d == 0:
            continue
        if d == 1:
            a = new_node()
            leg_node[(w, rot[0])] = a
            gadget_rot_plan.append((a, [("leg", rot[0])]))
        elif d == 2:
            a, b = new_node(), new_node()
            leg_node[(w, rot[0])] = a
            leg_node[(w, rot[1])] = b
            internal = len(gadget_internal)
            gadget_internal.append((a, b))
            gadget_rot_plan.append((a, [("leg", rot[0]), ("int", internal)]))
            gadget_rot_plan.append((b, [("int", internal), ("leg", rot[1])]))
        elif d == 3:
            t = [new_node(), new_node(), new_node()]
            for i in range(3):
                leg_node[(w, rot[i])] = t[i]
            base = len(gadget_internal)
            gadget_internal.append((t[0], t[1]))
            gadget_internal.append((t[1], t[2]))
            gadget_internal.append((t[2], t[0]))
            sides = ((base, base + 2), (base + 1, base), (base + 2, base + 1))
            for i in range(3):
                nxt, prv = sides[i]
                gadget_rot_plan.append((t[i], [("leg", rot[i]), ("int", nxt), ("int", prv)]))
        else:
            raise EmbeddingError("degree > 3 survived the splitting pass")

    dec_ends: list[tuple[int, int]] = []
    dec_weights: list[complex] = []
    leg_edge: dict[tuple[int, int], int] = {}
    base_matching: list[int] = []
    sub_rotations: dict[int, tuple[int, ...]] = {}

    def add_edge(a: int, b: int, w: complex) -> int:
        dec_ends.append((a, b))
        dec_weights.append(w)
        return len(dec_ends) - 1

    for e, (wu, wv) in enumerate(split_edges):
        a = leg_node[(wu, e)]
        b = leg_node[(wv, e)]
        if e >= n_orig:
            # equality edge from vertex splitting: both branch weights are 1,
            # so it stays a direct leg-to-leg edge
            eid = add_edge(a, b, 1.0 + 0.0j)
            leg_edge[(a, e)] = eid
            leg_edge[(b, e)] = eid
            base_matching.append(eid)
        else:
            x, y = new_node(), new_node()
            e_ax = add_edge(a, x, complex(unocc[e]))
            e_xy = add_edge(x, y, complex(occ[e]))
            e_yb = add_edge(y, b, 1.0 + 0.0j)
            leg_edge[(a, e)] = e_ax
            leg_edge[(b, e)] = e_yb
            base_matching.extend((e_ax, e_yb))
            sub_rotations[x] = (e_ax, e_xy)
            sub_rotations[y] = (e_xy, e_yb)

    internal_edge_ids = {
        idx: add_edge(a, b, 1.0 + 0.0j) for idx, (a, b) in enumerate(gadget_internal)
    }

    dec_rotations: list[tuple[int, ...]] = [()] * node_count
    for node, plan in gadget_rot_plan:
        dec_rotations[node] = tuple(
            leg_edge[(node, ref)] if tag == "leg" else internal_edge_ids[ref]
            for tag, ref in plan
        )
    for node, rot_ids in sub_rotations.items():
        dec_rotations[node] = rot_ids

    embedding = PlanarEmbedding(
        n_vertices=node_count,
        edges=tuple(dec_ends),
        rotations=tuple(dec_rotations),
    )
    orientation = kasteleyn_orient(embedding)
    sign = (
        _base_matching_sign(dec_ends, orientation, base_matching, node_count)
        if node_count
        else 1
    )
    return DecoratedSystem(
        n_nodes=node_count,
        edge_ends=tuple(dec_ends),
        edge_weights=tuple(dec_weights),
        rotations=tuple(dec_rotations),
        base_matching=tuple(base_matching),
        orientation=orientation,
        base_sign=sign,
    )


def _site_components(n_sites: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    adjacency: list[list[int]] = [[] for _ in range(n_sites)]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    seen = [False] * n_sites
    comps = []
    for v0 in range(n_sites):
        if seen[v0]:
            continue
        seen[v0] = True
        stack, comp = [v0], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def decorate(
    n_sites: int,
    edges: Sequence[tuple[int, int]],
    unoccupied: Sequence[float],
    occupied: Sequence[complex],
    rotations: Sequence[Sequence[int]],
) -> list[DecoratedComponent]:
    """Decorate each connected component of an interaction multigraph.

    `unoccupied[e]` / `occupied[e]` are the branch factors of edge e (cos
    theta and i sin theta for angle edges).  Each component is retried with
    reversed rotations if the first handedness fails the Euler check.
    """
    comps = _site_components(n_sites, edges)
    edge_comp: dict[int, int] = {}
    site_comp: dict[int, int] = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            site_comp[v] = ci
    for e, (u, _v) in enumerate(edges):
        edge_comp[e] = site_comp[u]

    out: list[DecoratedComponent] = []
    for ci, comp in enumerate(comps):
        local_id = {v: i for i, v in enumerate(comp)}
        local_edges = []
        local_unocc = []
        local_occ = []
        edge_local: dict[int, int] = {}
        for e, (u, v) in enumerate(edges):
            if edge_comp[e] != ci:
                continue
            edge_local[e] = len(local_edges)
            local_edges.append((local_id[u], local_id[v]))
            local_unocc.append(unoccupied[e])
            local_occ.append(occupied[e])
        local_rot = [
            [edge_local[e] for e in rotations[v]] for v in comp
        ]
        try:
            system = _decorate_connected(
                len(comp), local_edges, local_unocc, local_occ, local_rot
            )
        except EmbeddingError:
            mirrored = [list(reversed(r)) for r in local_rot]
            system = _decorate_connected(
                len(comp), local_edges, local_unocc, local_occ, mirrored
            )
        out.append(DecoratedComponent(sites=len(comp), system=system))
    return out


__all__ = ["DecoratedSystem", "DecoratedComponent", "decorate"]
