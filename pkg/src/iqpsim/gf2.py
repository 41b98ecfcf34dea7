"""Dense GF(2) linear algebra for gate-incidence matrices.

Rows are packed into Python ints (bit j = column j), so row operations are
single XORs of machine words.  Pivot selection is always the first row with
a set bit in the pivot column, which makes elimination traces deterministic
and replayable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import BipartiteInteractionGraph


@dataclass(frozen=True)
class GF2Matrix:
    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.row_bits) != self.rows:
            raise ValueError("row count mismatch")
        if self.cols < 0 or any(r >> self.cols for r in self.row_bits):
            raise ValueError("row has bits beyond the column count")

    @staticmethod
    def from_rows(rows: Iterable[Sequence[int]], cols: int | None = None) -> "GF2Matrix":
        dense = [list(r) for r in rows]
        width = cols if cols is not None else (len(dense[0]) if dense else 0)
        bits = []
        for r in dense:
            if len(r) != width:
                raise ValueError("ragged rows")
            bits.append(sum((1 << j) for j, v in enumerate(r) if v & 1))
        return GF2Matrix(rows=len(dense), cols=width, row_bits=tuple(bits))

    @staticmethod
    def from_graph(graph: BipartiteInteractionGraph) -> "GF2Matrix":
        """R[v][u] = 1 iff qubit v is in the u-th gate's neighborhood."""
        bits = []
        for v in range(1, graph.n_qubits + 1):
            row = 0
            for j, nb in enumerate(graph.neighborhoods):
                if v in nb:
                    row |= 1 << j
            bits.append(row)
        return GF2Matrix(rows=graph.n_qubits, cols=graph.n_gates, row_bits=tuple(bits))

    def entry(self, i: int, j: int) -> int:
        return (self.row_bits[i] >> j) & 1

    def to_dense(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self) -> "GF2Matrix":
        cols = []
        for j in range(self.cols):
            cols.append(sum((1 << i) for i in range(self.rows) if self.entry(i, j)))
        return GF2Matrix(rows=self.cols, cols=self.rows, row_bits=tuple(cols))

    def column_int(self, j: int) -> int:
        return sum((1 << i) for i in range(self.rows) if self.entry(i, j))

    def mul_vector(self, c: Sequence[int]) -> tuple[int, ...]:
        """R @ c over GF(2); c indexed by column."""
        if len(c) != self.cols:
            raise ValueError("vector length mismatch")
        packed = sum((1 << j) for j, v in enumerate(c) if v & 1)
        return tuple((self.row_bits[i] & packed).bit_count() & 1 for i in range(self.rows))


@dataclass(frozen=True)
class EliminationTrace:
    """Row operations in application order: ("swap", i, j) or ("add", src, dst).

    ("add", src, dst) means row[dst] ^= row[src], the row-level picture of a
    CNOT acting on the qubit labels.  Replaying the trace on the original
    matrix reproduces the reduced matrix exactly.
    """

    ops: tuple[tuple[str, int, int], ...]

    def replay(self, matrix: GF2Matrix) -> GF2Matrix:
        work = list(matrix.row_bits)
        for kind, a, b in self.ops:
            if kind == "swap":
                work[a], work[b] = work[b], work[a]
            elif kind == "add":
                work[b] ^= work[a]
            else:
                raise ValueError(f"unknown trace op {kind!r}")
        return GF2Matrix(rows=matrix.rows, cols=matrix.cols, row_bits=tuple(work))


def gauss_jordan(matrix: GF2Matrix) -> tuple[GF2Matrix, EliminationTrace]:
    """Reduced row-echelon form with the operation trace.

    For a square invertible matrix the result is the identity.
    """
    work = list(matrix.row_bits)
    ops: list[tuple[str, int, int]] = []
    rank = 0
    for col in range(matrix.cols):
        pivot = next(
            (i for i in range(rank, matrix.rows) if (work[i] >> col) & 1), None
        )
        if pivot is None:
            continue
        if pivot != rank:
            work[rank], work[pivot] = work[pivot], work[rank]
            ops.append(("swap", rank, pivot))
        for i in range(matrix.rows):
            if i != rank and (work[i] >> col) & 1:
                work[i] ^= work[rank]
                ops.append(("add", rank, i))
        rank += 1
        if rank == matrix.rows:
            break
    reduced = GF2Matrix(rows=matrix.rows, cols=matrix.cols, row_bits=tuple(work))
    return reduced, EliminationTrace(ops=tuple(ops))


def rank(matrix: GF2Matrix) -> int:
    work = list(matrix.row_bits)
    r = 0
    for col in range(matrix.cols):
        pivot = next((i for i in range(r, matrix.rows) if (work[i] >> col) & 1), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(r + 1, matrix.rows):
            if (work[i] >> col) & 1:
                work[i] ^= work[r]
        r += 1
        if r == matrix.rows:
            break
    return r


def is_independent_columns(matrix: GF2Matrix) -> bool:
    return rank(matrix) == matrix.cols


def is_full_rank(matrix: GF2Matrix) -> bool:
    return rank(matrix) == matrix.rows


def is_ifrb(matrix: GF2Matrix) -> bool:
    return matrix.rows == matrix.cols and rank(matrix) == matrix.rows


def solve(matrix: GF2Matrix, m: Sequence[int]) -> tuple[int, ...] | None:
    """Any c with R c = m over GF(2); None when m is outside the column space.

    Free variables are set to 0 (documented tie-break); the solution is
    unique when R is invertible.
    """
    if len(m) != matrix.rows:
        raise ValueError("right-hand side length mismatch")
    work = list(matrix.row_bits)
    rhs = [int(b) & 1 for b in m]
    pivot_cols: list[int] = []
    r = 0
    for col in range(matrix.cols):
        pivot = next((i for i in range(r, matrix.rows) if (work[i] >> col) & 1), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
        for i in range(matrix.rows):
            if i != r and (work[i] >> col) & 1:
                work[i] ^= work[r]
                rhs[i] ^= rhs[r]
        pivot_cols.append(col)
        r += 1
        if r == matrix.rows:
            break
    for i in range(r, matrix.rows):
        if work[i] == 0 and rhs[i]:
            return None
    c = [0] * matrix.cols
    for row_idx, col in enumerate(pivot_cols):
        c[col] = rhs[row_idx]
    return tuple(c)
