"""GF(2) linear algebra on bit-packed rows.

Rows are Python integers used as bit sets: bit j (value ``1 << j``) holds the
entry of column j, so serialized integers are little-endian in column order.
Subspaces are kept in reduced row echelon form, which makes equality,
hashing and frequency counting exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Gf2Matrix",
    "Gf2Subspace",
    "bits_to_int",
    "int_to_bits",
    "rref",
    "span",
    "span_ints",
    "contains",
    "contains_vector",
    "sum_dim",
    "intersect_dim",
]


def bits_to_int(bits: Sequence[int]) -> int:
    """Pack a 0/1 sequence into an integer bit set (bit j = entry j)."""
    out = 0
    for j, b in enumerate(bits):
        if int(b) & 1:
            out |= 1 << j
    return out


def int_to_bits(row: int, n: int) -> list[int]:
    """Unpack an integer bit set into a list of n 0/1 entries."""
    return [(row >> j) & 1 for j in range(n)]


def _rref_rows(rows: Iterable[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Row-reduce integer rows; returns (rows with zeros at the bottom, pivot columns)."""
    work = list(rows)
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        if r == len(work):
            break
        mask = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & mask), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and work[i] & mask:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
    return work, pivots


@dataclass(frozen=True)
class Gf2Matrix:
    """Dense GF(2) matrix with bit-packed rows."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.rows) != self.n_rows:
            raise ValueError("row count mismatch")
        for row in self.rows:
            if row < 0 or row >> self.n_cols:
                raise ValueError("row has bits outside the column range")

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], n_cols: int | None = None) -> "Gf2Matrix":
        if n_cols is None:
            n_cols = len(dense[0]) if dense else 0
        return cls(len(dense), n_cols, tuple(bits_to_int(row) for row in dense))

    def to_dense(self) -> list[list[int]]:
        return [int_to_bits(row, self.n_cols) for row in self.rows]


def rref(m: Gf2Matrix) -> tuple[Gf2Matrix, int]:
    """Unique reduced row echelon form of m, plus its rank."""
    work, pivots = _rref_rows(m.rows, m.n_cols)
    return Gf2Matrix(m.n_rows, m.n_cols, tuple(work)), len(pivots)


def _reduce_vector(vec: int, basis: Sequence[int], pivots: Sequence[int]) -> int:
    for row, col in zip(basis, pivots):
        if vec & (1 << col):
            vec ^= row
    return vec


@dataclass(frozen=True)
class Gf2Subspace:
    """A subspace of F2^ambient, stored as its canonical RREF basis.

    Two subspaces are equal iff their RREF bases are identical, so instances
    can be used directly as dictionary keys for frequency statistics.
    """

    ambient: int
    basis: tuple[int, ...]
    _pivots: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        reduced, pivots = _rref_rows(self.basis, self.ambient)
        if tuple(reduced[: len(pivots)]) != self.basis:
            raise ValueError("basis is not in reduced row echelon form")
        object.__setattr__(self, "_pivots", tuple(pivots))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def key(self) -> str:
        """Canonical string key: ambient, rank, RREF rows in order."""
        return f"{self.ambient}:{self.rank}:" + ",".join(str(r) for r in self.basis)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "rank": self.rank, "rows": list(self.basis)}

    @classmethod
    def from_json(cls, obj: dict) -> "Gf2Subspace":
        sub = span_ints(obj["rows"], obj["ambient"])
        if sub.rank != obj.get("rank", sub.rank):
            raise ValueError("serialized rank does not match basis")
        return sub

    @classmethod
    def from_key(cls, key: str) -> "Gf2Subspace":
        ambient_s, _rank_s, rows_s = key.split(":")
        rows = [int(r) for r in rows_s.split(",")] if rows_s else []
        return span_ints(rows, int(ambient_s))


def span_ints(rows: Iterable[int], ambient: int) -> Gf2Subspace:
    """Span of integer bit-set vectors inside F2^ambient."""
    rows = list(rows)
    for row in rows:
        if row < 0 or row >> ambient:
            raise ValueError("vector has bits outside the ambient dimension")
    reduced, pivots = _rref_rows(rows, ambient)
    return Gf2Subspace(ambient, tuple(reduced[: len(pivots)]))


def span(vectors: Iterable[Sequence[int]], ambient: int | None = None) -> Gf2Subspace:
    """Span of 0/1 vectors; the empty list needs an explicit ambient dimension."""
    vecs = [list(v) for v in vectors]
    if ambient is None:
        if not vecs:
            raise ValueError("ambient dimension required for an empty vector list")
        ambient = len(vecs[0])
    for v in vecs:
        if len(v) != ambient:
            raise ValueError(f"vector length {len(v)} does not match ambient {ambient}")
    return span_ints([bits_to_int(v) for v in vecs], ambient)


def _check_same_ambient(u: Gf2Subspace, w: Gf2Subspace) -> None:
    if u.ambient != w.ambient:
        raise ValueError(f"ambient mismatch: {u.ambient} != {w.ambient}")


def contains(u: Gf2Subspace, w: Gf2Subspace) -> bool:
    """True iff w is a subspace of u."""
    _check_same_ambient(u, w)
    return all(_reduce_vector(row, u.basis, u._pivots) == 0 for row in w.basis)


def contains_vector(u: Gf2Subspace, vec: int) -> bool:
    if vec < 0 or vec >> u.ambient:
        raise ValueError("vector has bits outside the ambient dimension")
    return _reduce_vector(vec, u.basis, u._pivots) == 0


def sum_dim(u: Gf2Subspace, w: Gf2Subspace) -> int:
    """Dimension of u + w."""
    _check_same_ambient(u, w)
    _, pivots = _rref_rows(list(u.basis) + list(w.basis), u.ambient)
    return len(pivots)


def intersect_dim(u: Gf2Subspace, w: Gf2Subspace) -> int:
    """Dimension of the intersection, via dim(u) + dim(w) - dim(u + w)."""
    return u.rank + w.rank - sum_dim(u, w)


def subspace_sum(u: Gf2Subspace, w: Gf2Subspace) -> Gf2Subspace:
    """The subspace u + w."""
    _check_same_ambient(u, w)
    return span_ints(list(u.basis) + list(w.basis), u.ambient)
