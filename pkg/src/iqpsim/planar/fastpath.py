"""Compiled per-step marginal evaluation for the planar sampler.

A sampling chain evaluates one merged-graph marginal per measurement step,
and at step k the merged graph's *structure* (sites, edges, rotations,
decoration, Kasteleyn orientation, sparsity pattern) depends only on k and
the measurement order, never on the sampled bits.  The bits enter through
the field renormalization, which only toggles each edge weight between
(cos t, i sin t) and (-sin t, i cos t).  This module compiles the structure
once per step and answers weight-only queries:

* field bits are folded in by a T-join on a spanning forest: a tree edge is
  shifted iff its subtree holds an odd number of field 1-bits, which equals
  any pairing-by-paths and is computed per query from precomputed bitmasks;
* the Kasteleyn matrix's sparsity pattern is fixed; a query fills a template
  data vector and runs a sparse LU (dense LAPACK below a small cutoff) for
  log |det|^(1/2);
* matching signs are irrelevant here because marginals only need |Z|.

Construction details that keep the per-step cost linear with small
constants: face labels come from numpy pointer doubling over the
dart-successor permutation; the decorated graph's spanning forest is not
searched but derived from the merged graph's forest (gadget spanners, stub
and middle edges, equality edges, plus the closing stub exactly on merged
tree edges); and each face-parity condition costs O(1) via the identity
against(f) = xor(sides) ^ xor(orientation flags) over the face's darts.
Agreement with the readable `merged`/`fisher` path is covered by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from ..errors import EmbeddingError, MergeError
from .instance import PlanarIsingInstance

LN2 = math.log(2.0)
_DENSE_CUTOFF = 600


# ---------------------------------------------------------------------------
# array-based decoration of one connected component


def _decorate_arrays(
    n_sites: int,
    edges_u: list[int],
    edges_v: list[int],
    rotations: list[list[int]],
    edge_in_tree: list[bool],
    mirror: bool = False,
) -> "tuple[int, list[int], list[int], list[int], list[int], list[int]] | None":
    """Decorate a connected multigraph; None if the gadget handedness is wrong.

    `edge_in_tree` must flag a spanning tree of the input graph; the
    decorated tree is derived from it without any search.  Returns
    (node count, dec_u, dec_v, orientation flags, cos_slot, sin_slot) where
    cos_slot[e] / sin_slot[e] are the decorated edge ids carrying the
    unoccupied / occupied weight of input edge e; every other decorated edge
    has constant weight 1.

    All ids are closed-form: decorated edges 3e..3e+2 subdivide input edge
    e, equality edges follow at 3*n_edges, gadget-internal edges last;
    gadget nodes come first (one per split-vertex rotation slot, in order),
    then the subdivision pairs.
    """
    n_edges = len(edges_u)
    if mirror:
        rotations = [rot[::-1] for rot in rotations]

    # vertex split to max degree 3; equality edges get input ids >= n_edges
    side_node: dict[tuple[int, int], int] = {}
    split_rot: list[list[int]] = []
    eq_u: list[int] = []
    eq_v: list[int] = []
    for v in range(n_sites):
        rot = rotations[v]
        d = len(rot)
        if d <= 3:
            node = len(split_rot)
            split_rot.append(rot)
            for e in rot:
                side_node[(v, e)] = node
            continue
        chain_len = d - 2
        eq_base = n_edges + len(eq_u)
        first_node = len(split_rot)
        for t in range(chain_len):
            node = len(split_rot)
            if t == 0:
                split_rot.append([rot[0], rot[1], eq_base])
                legs = rot[:2]
            elif t == chain_len - 1:
                split_rot.append([eq_base + t - 1, rot[d - 2], rot[d - 1]])
                legs = rot[d - 2 :]
            else:
                split_rot.append([eq_base + t - 1, rot[t + 1], eq_base + t])
                legs = [rot[t + 1]]
            for e in legs:
                side_node[(v, e)] = node
        for t in range(chain_len - 1):
            eq_u.append(first_node + t)
            eq_v.append(first_node + t + 1)

    split_u = [side_node[(edges_u[e], e)] for e in range(n_edges)]
    split_v = [side_node[(edges_v[e], e)] for e in range(n_edges)]
    split_u.extend(eq_u)
    split_v.extend(eq_v)
    n_split_edges = len(split_u)
    n_eq = len(eq_u)

    # fixed layout
    n_gadget = 2 * n_split_edges  # one gadget node per edge end
    node_count = n_gadget + 2 * n_edges
    eq_edge_base = 3 * n_edges
    internal_base = eq_edge_base + n_eq

    def leg_edge_id(e: int, side: int) -> int:
        if e < n_edges:
            return 3 * e + 2 * side
        return eq_edge_base + (e - n_edges)

    # gadget pass: fills leg_of per split dart, gadget rotations, internals
    leg_of = [-1] * (2 * n_split_edges)
    internal_u: list[int] = []
    internal_v: list[int] = []
    internal_tree: list[bool] = []
    gadget_rot: list[int] = []  # flattened; gadget node segment length = its degree
    gadget_seg: list[int] = []
    next_node = 0
    for w, rot in enumerate(split_rot):
        d = len(rot)
        if d == 0:
            continue
        base = next_node
        next_node += d
        for i, e in enumerate(rot):
            side = 0 if split_u[e] == w else 1
            leg_of[2 * e + side] = base + i
        if d == 1:
            gadget_rot.append(leg_edge_id(rot[0], 0 if split_u[rot[0]] == w else 1))
            gadget_seg.append(1)
        elif d == 2:
            idx = internal_base + len(internal_u)
            internal_u.append(base)
            internal_v.append(base + 1)
            internal_tree.append(True)
            s0 = 0 if split_u[rot[0]] == w else 1
            s1 = 0 if split_u[rot[1]] == w else 1
            gadget_rot.extend((leg_edge_id(rot[0], s0), idx, idx, leg_edge_id(rot[1], s1)))
            gadget_seg.extend((2, 2))
        else:
            idx = internal_base + len(internal_u)
            internal_u.extend((base, base + 1, base + 2))
            internal_v.extend((base + 1, base + 2, base))
            internal_tree.extend((True, True, False))
            s0 = 0 if split_u[rot[0]] == w else 1
            s1 = 0 if split_u[rot[1]] == w else 1
            s2 = 0 if split_u[rot[2]] == w else 1
            gadget_rot.extend(
                (
                    leg_edge_id(rot[0], s0), idx, idx + 2,
                    leg_edge_id(rot[1], s1), idx + 1, idx,
                    leg_edge_id(rot[2], s2), idx + 2, idx + 1,
                )
            )
            gadget_seg.extend((3, 3, 3))
    if next_node != n_gadget:
        raise EmbeddingError("gadget allocation out of sync")

    # decorated edges in fixed order: subdivisions, equality edges, internals
    dec_u: list[int] = []
    dec_v: list[int] = []
    dec_tree: list[bool] = []
    sub_rot_flat: list[int] = []
    for e in range(n_edges):
        a = leg_of[2 * e]
        b = leg_of[2 * e + 1]
        x = n_gadget + 2 * e
        e_ax = 3 * e
        dec_u.extend((a, x, x + 1))
        dec_v.extend((x, x + 1, b))
        dec_tree.extend((True, True, bool(edge_in_tree[e])))
        sub_rot_flat.extend((e_ax, e_ax + 1, e_ax + 1, e_ax + 2))
    for j in range(n_eq):
        e = n_edges + j
        dec_u.append(leg_of[2 * e])
        dec_v.append(leg_of[2 * e + 1])
        dec_tree.append(True)
    dec_u.extend(internal_u)
    dec_v.extend(internal_v)
    dec_tree.extend(internal_tree)

    # flattened rotations in node-id order: gadget nodes then x,y pairs
    rot_flat = gadget_rot + sub_rot_flat
    offsets = [0] * (node_count + 1)
    pos = 0
    for i, seg in enumerate(gadget_seg):
        pos += seg
        offsets[i + 1] = pos
    for i in range(2 * n_edges):
        pos += 2
        offsets[len(gadget_seg) + i + 1] = pos

    cos_slot = [3 * e for e in range(n_edges)]
    sin_slot = [3 * e + 1 for e in range(n_edges)]
    orientation = _kasteleyn_fast(node_count, dec_u, dec_v, rot_flat, offsets, dec_tree)
    if orientation is None:
        return None
    return node_count, dec_u, dec_v, orientation, cos_slot, sin_slot


def _face_labels(succ: np.ndarray) -> tuple[np.ndarray, int]:
    """Orbit labels of the dart-successor permutation via pointer doubling."""
    labels = np.arange(succ.shape[0], dtype=np.int64)
    hop = succ
    while True:
        new = np.minimum(labels, labels[hop])
        if np.array_equal(new, labels):
            break
        labels = new
        hop = hop[hop]
    uniq, face_of = np.unique(labels, return_inverse=True)
    return face_of, int(uniq.shape[0])


def _kasteleyn_fast(
    n_nodes: int,
    dec_u: list[int],
    dec_v: list[int],
    rot_flat: list[int],
    offsets: list[int],
    in_tree: list[bool],
) -> "list[int] | None":
    """Orientation flags, or None when the rotation system is not genus 0.

    The input graph must be connected.  Darts are encoded 2*e + side with
    side 0 directed dec_u -> dec_v.  `in_tree` must flag a spanning tree;
    co-tree edges are fixed leaves-inward on the dual tree.
    """
    n_edges = len(dec_u)
    if n_edges == 0:
        return []
    du = np.asarray(dec_u, dtype=np.int64)
    flat = np.asarray(rot_flat, dtype=np.int64)
    off = np.asarray(offsets, dtype=np.int64)
    seg = np.diff(off)
    owner = np.repeat(np.arange(n_nodes, dtype=np.int64), seg)

    # successor of the dart arriving at `owner` along edge `flat[pos]` is the
    # out-dart along the next rotation entry
    idx = np.arange(flat.shape[0], dtype=np.int64)
    nxt_pos = idx + 1
    ends = off[1:][seg > 0] - 1
    starts = off[:-1][seg > 0]
    nxt_pos[ends] = starts
    nxt_edge = flat[nxt_pos]
    d_in = 2 * flat + (du[flat] == owner)
    d_out = 2 * nxt_edge + (du[nxt_edge] != owner)
    succ = np.empty(2 * n_edges, dtype=np.int64)
    succ[d_in] = d_out

    face_of, n_faces = _face_labels(succ)
    # Euler check for the connected input
    if n_nodes - n_edges + n_faces != 2:
        return None
    sides = np.arange(2 * n_edges, dtype=np.int64) & 1
    side_parity = (
        np.bincount(face_of, weights=sides, minlength=n_faces).astype(np.int64) & 1
    )
    face_sizes = np.bincount(face_of, minlength=n_faces)
    root = int(np.argmax(face_sizes))

    tree = np.asarray(in_tree, dtype=bool)
    if int(tree.sum()) != n_nodes - 1:
        raise EmbeddingError("provided tree is not spanning")

    # dual tree over co-tree edges
    co_tree = np.nonzero(~tree)[0]
    dual_adj: list[list[tuple[int, int]]] = [[] for _ in range(n_faces)]
    f_even = face_of[2 * co_tree]
    f_odd = face_of[2 * co_tree + 1]
    for e, f1, f2 in zip(co_tree.tolist(), f_even.tolist(), f_odd.tolist()):
        dual_adj[f1].append((f2, e))
        dual_adj[f2].append((f1, e))
    parent_edge = [-1] * n_faces
    parent_face = [-1] * n_faces
    visited = [False] * n_faces
    visited[root] = True
    queue: list[int] = [root]
    head = 0
    while head < len(queue):
        fi = queue[head]
        head += 1
        for fj, e in dual_adj[fi]:
            if not visited[fj]:
                visited[fj] = True
                parent_edge[fj] = e
                parent_face[fj] = fi
                queue.append(fj)
    if not all(visited):
        return None

    # against(f) = side_parity(f) ^ xor of orientation flags over f's darts;
    # tree edges keep flag 0, each fixed co-tree edge folds into its parent
    acc = (1 ^ side_parity).tolist()
    orientation = [0] * n_edges
    for fi in reversed(queue):
        e_fix = parent_edge[fi]
        if e_fix < 0:
            continue
        x = acc[fi]
        orientation[e_fix] = x
        if x:
            acc[parent_face[fi]] ^= 1
    return orientation


# ---------------------------------------------------------------------------
# compiled per-step evaluator


@dataclass
class _CompiledStep:
    k: int
    prefactor_log2: int
    site_count: int
    comp_parity_masks: list[int]
    tree_edges: np.ndarray
    tree_masks: list[int]
    edge_cos: np.ndarray
    edge_sin: np.ndarray
    n_nodes: int
    rows: np.ndarray
    cols: np.ndarray
    template: np.ndarray  # entry values with weight slots zeroed
    plus_pos: np.ndarray  # template positions of +w per weighted pair
    minus_pos: np.ndarray
    csc_indices: "np.ndarray | None"
    csc_indptr: "np.ndarray | None"
    csc_perm: "np.ndarray | None"

    def log_marginal(self, bits: int) -> float:
        for mask in self.comp_parity_masks:
            if (mask & bits).bit_count() & 1:
                return -math.inf
        flips = np.zeros(len(self.edge_cos), dtype=bool)
        if bits:
            flip_ids = [
                e
                for e, mask in zip(self.tree_edges, self.tree_masks)
                if (mask & bits).bit_count() & 1
            ]
            flips[flip_ids] = True
        cos_t = np.where(flips, -self.edge_sin, self.edge_cos)
        sin_t = np.where(flips, self.edge_cos, self.edge_sin)
        w = np.empty(2 * len(cos_t), dtype=np.complex128)
        w[0::2] = cos_t
        w[1::2] = 1j * sin_t
        data = self.template.copy()
        data[self.plus_pos] = w
        data[self.minus_pos] = -w
        logabs = self._half_logabsdet(data)
        if logabs == -math.inf:
            return -math.inf
        return logabs + (self.site_count - self.prefactor_log2) * LN2

    def _half_logabsdet(self, data: np.ndarray) -> float:
        if self.n_nodes == 0:
            return 0.0
        if self.n_nodes < _DENSE_CUTOFF:
            dense = np.zeros((self.n_nodes, self.n_nodes), dtype=np.complex128)
            dense[self.rows, self.cols] = data
            _, logdet = np.linalg.slogdet(dense)
            return 0.5 * float(logdet)
        matrix = csc_matrix(
            (data[self.csc_perm], self.csc_indices, self.csc_indptr),
            shape=(self.n_nodes, self.n_nodes),
        )
        try:
            lu = splu(matrix, permc_spec="COLAMD")
        except RuntimeError:
            return -math.inf
        diag = np.abs(lu.U.diagonal())
        if np.any(diag == 0.0) or not np.all(np.isfinite(diag)):
            return -math.inf
        return 0.5 * float(np.log(diag).sum())


def compile_step(
    instance: PlanarIsingInstance,
    order: list[int],
    k: int,
    edge_cos: "np.ndarray | None" = None,
    edge_sin: "np.ndarray | None" = None,
) -> _CompiledStep:
    """Compile the merged-graph structure for the first k measured sites.

    edge_cos/edge_sin may carry precomputed cos/sin of the instance's gate
    angles (one entry per gate) to avoid re-deriving exact angles per step.
    """
    if edge_cos is None:
        edge_cos = np.array([w.cos() for w in instance.weights])
    if edge_sin is None:
        edge_sin = np.array([w.sin() for w in instance.weights])
    measured = order[:k]
    pos_of = {v: i for i, v in enumerate(measured)}
    base_id = {v: i for i, v in enumerate(sorted(measured))}
    m = len(measured)
    rotations = instance.embedding.rotations

    edges_arr = np.asarray(instance.edges, dtype=np.int64).reshape(-1, 2)
    measured_mask = np.zeros(instance.n_sites, dtype=bool)
    measured_mask[measured] = True
    if edges_arr.shape[0]:
        eu, ev = edges_arr[:, 0], edges_arr[:, 1]
        touched_mask = measured_mask[eu] | measured_mask[ev]
        gate_ids = np.nonzero(touched_mask)[0].tolist()
        endpoints = np.concatenate([eu[touched_mask], ev[touched_mask]])
        boundary = np.unique(endpoints[~measured_mask[endpoints]]).tolist()
    else:
        gate_ids = []
        boundary = []
    touched = set(gate_ids)
    shared_id = {w: 2 * m + i for i, w in enumerate(boundary)}
    n_merged = 2 * m + len(boundary)

    base_edge = {}
    mirror_edge = {}
    m_u: list[int] = []
    m_v: list[int] = []

    def b_site(v: int) -> int:
        return base_id[v] if v in base_id else shared_id[v]

    def m_site(v: int) -> int:
        return base_id[v] + m if v in base_id else shared_id[v]

    for e in gate_ids:
        u, v = instance.edges[e]
        base_edge[e] = len(m_u)
        m_u.append(b_site(u))
        m_v.append(b_site(v))
    for e in gate_ids:
        u, v = instance.edges[e]
        mirror_edge[e] = len(m_u)
        m_u.append(m_site(u))
        m_v.append(m_site(v))
    gate_arr = np.asarray(gate_ids, dtype=np.int64)
    cos_list = (
        np.concatenate([edge_cos[gate_arr], edge_cos[gate_arr]])
        if gate_ids
        else np.empty(0)
    )
    sin_list = (
        np.concatenate([edge_sin[gate_arr], -edge_sin[gate_arr]])
        if gate_ids
        else np.empty(0)
    )

    merged_rot: list[list[int]] = [[] for _ in range(n_merged)]
    for v, idx in base_id.items():
        rot = rotations[v]
        merged_rot[idx] = [base_edge[e] for e in rot]
        merged_rot[idx + m] = [mirror_edge[e] for e in reversed(rot)]
    for w in boundary:
        # the mirror block must sit in the cyclic gap left by the dropped
        # unmeasured-side edges: start the surviving arc right after it
        rot_w = rotations[w]
        start = 0
        for i in range(len(rot_w)):
            if rot_w[i] in touched and rot_w[i - 1] not in touched:
                start = i
                break
        surviving = [e for e in rot_w[start:] + rot_w[:start] if e in touched]
        rot = [base_edge[e] for e in surviving]
        rot.extend(mirror_edge[e] for e in reversed(surviving))
        merged_rot[shared_id[w]] = rot

    # field source position per merged site (-1 for boundary)
    source = [-1] * n_merged
    for v, idx in base_id.items():
        source[idx] = pos_of[v]
        source[idx + m] = pos_of[v]

    # spanning forest + components + subtree masks for the query-time T-join
    n_edges = len(m_u)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_merged)]
    for e in range(n_edges):
        adj[m_u[e]].append((m_v[e], e))
        adj[m_v[e]].append((m_u[e], e))
    comp_of = [-1] * n_merged
    parent = [(-1, -1)] * n_merged
    bfs_order: list[int] = []
    comp_masks: list[int] = []
    merged_in_tree = [False] * n_edges
    n_comp = 0
    site_comps: list[list[int]] = []
    for v0 in range(n_merged):
        if comp_of[v0] >= 0:
            continue
        comp_sites = [v0]
        comp_of[v0] = n_comp
        queue = [v0]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            bfs_order.append(v)
            for w, e in adj[v]:
                if comp_of[w] < 0:
                    comp_of[w] = n_comp
                    parent[w] = (v, e)
                    merged_in_tree[e] = True
                    queue.append(w)
                    comp_sites.append(w)
        site_comps.append(comp_sites)
        mask = 0
        for v in comp_sites:
            if source[v] >= 0:
                mask ^= 1 << source[v]
        comp_masks.append(mask)
        n_comp += 1

    submask = [0] * n_merged
    for v in range(n_merged):
        if source[v] >= 0:
            submask[v] = 1 << source[v]
    tree_edges: list[int] = []
    tree_masks: list[int] = []
    for v in reversed(bfs_order):
        pv, pe = parent[v]
        if pv < 0:
            continue
        submask[pv] ^= submask[v]
        if submask[v]:
            tree_edges.append(pe)
            tree_masks.append(submask[v])

    # decoration per merged component, chirality retry with mirrored rotations
    total_nodes = 0
    rows_parts: list[np.ndarray] = []
    cols_parts: list[np.ndarray] = []
    template_parts: list[np.ndarray] = []
    plus_pos = np.empty(2 * n_edges, dtype=np.int64)
    minus_pos = np.empty(2 * n_edges, dtype=np.int64)
    template_offset = 0
    single_comp = len(site_comps) == 1
    for comp_sites in site_comps:
        if single_comp:
            local_u, local_v = m_u, m_v
            edge_map = list(range(n_edges))
            local_rot = merged_rot
            local_tree = merged_in_tree
            local_sites = n_merged
        else:
            local_id = {v: i for i, v in enumerate(comp_sites)}
            local_u, local_v = [], []
            edge_map = []
            local_of_edge: dict[int, int] = {}
            for v in comp_sites:
                for w, e in adj[v]:
                    if m_u[e] == v:  # visit each edge once, from its u endpoint
                        local_of_edge[e] = len(local_u)
                        local_u.append(local_id[m_u[e]])
                        local_v.append(local_id[m_v[e]])
                        edge_map.append(e)
            local_rot = [[local_of_edge[e] for e in merged_rot[v]] for v in comp_sites]
            local_tree = [merged_in_tree[e] for e in edge_map]
            local_sites = len(comp_sites)
        result = _decorate_arrays(local_sites, local_u, local_v, local_rot, local_tree)
        if result is None:
            result = _decorate_arrays(
                local_sites, local_u, local_v, local_rot, local_tree, mirror=True
            )
            if result is None:
                # the measured region's boundary is not co-facial, so the
                # mirrored copy cannot be glued in the plane at this step
                raise MergeError(
                    "merged graph is not planar at this measurement step; "
                    "the measurement order must keep the boundary on one face"
                )
        nodes, dec_u, dec_v, orient, cos_slot, sin_slot = result

        n_dec = len(dec_u)
        ends = np.array([dec_u, dec_v], dtype=np.int64)
        flags = np.asarray(orient, dtype=bool)
        heads = np.where(flags, ends[1], ends[0]) + total_nodes
        tails = np.where(flags, ends[0], ends[1]) + total_nodes
        part_rows = np.concatenate([heads, tails])
        part_cols = np.concatenate([tails, heads])
        part_template = np.concatenate(
            [np.ones(n_dec, dtype=np.complex128), -np.ones(n_dec, dtype=np.complex128)]
        )
        cos_slot_arr = np.asarray(cos_slot, dtype=np.int64)
        sin_slot_arr = np.asarray(sin_slot, dtype=np.int64)
        ge = np.asarray(edge_map, dtype=np.int64)
        plus_pos[2 * ge] = template_offset + cos_slot_arr
        plus_pos[2 * ge + 1] = template_offset + sin_slot_arr
        minus_pos[2 * ge] = template_offset + cos_slot_arr + n_dec
        minus_pos[2 * ge + 1] = template_offset + sin_slot_arr + n_dec
        rows_parts.append(part_rows)
        cols_parts.append(part_cols)
        template_parts.append(part_template)
        template_offset += 2 * n_dec
        total_nodes += nodes

    rows = np.concatenate(rows_parts) if rows_parts else np.empty(0, dtype=np.int64)
    cols = np.concatenate(cols_parts) if cols_parts else np.empty(0, dtype=np.int64)
    template = (
        np.concatenate(template_parts)
        if template_parts
        else np.empty(0, dtype=np.complex128)
    )

    csc_indices = csc_indptr = csc_perm = None
    if total_nodes >= _DENSE_CUTOFF:
        tags = np.arange(1, template.shape[0] + 1, dtype=np.float64)
        pattern = csc_matrix((tags, (rows, cols)), shape=(total_nodes, total_nodes))
        csc_perm = pattern.data.astype(np.int64) - 1
        csc_indices = pattern.indices.copy()
        csc_indptr = pattern.indptr.copy()

    return _CompiledStep(
        k=k,
        prefactor_log2=2 * m + len(boundary),
        site_count=n_merged,
        comp_parity_masks=comp_masks,
        tree_edges=np.asarray(tree_edges, dtype=np.int64),
        tree_masks=tree_masks,
        edge_cos=cos_list,
        edge_sin=sin_list,
        n_nodes=total_nodes,
        rows=rows,
        cols=cols,
        template=template,
        plus_pos=plus_pos,
        minus_pos=minus_pos,
        csc_indices=csc_indices,
        csc_indptr=csc_indptr,
        csc_perm=csc_perm,
    )


__all__ = ["compile_step", "_CompiledStep"]
