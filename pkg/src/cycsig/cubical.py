"""Cubical comparison space in the l-infinity unit tangent bundle.

The space is the 2-skeleton of a set of equal-size lattice boxes. Cells are
elementary cubes in doubled coordinates: along each axis an interval is
either degenerate {m} (even doubled coordinate 2m) or full [m, m+1] (odd
doubled coordinate 2m+1); a cell of dimension t has t odd axes. Per-axis
doubled coordinates are packed into a single uint64 (8 bits per axis), so
deduplication of shared faces and cell lookup are sorted-array operations.

The degree-one cocycle basis is computed exactly over GF(2): square
boundaries are restricted to the complement of a spanning forest of the
1-skeleton, and a basis of the orthogonal complement of their span is found
by iterated variable merging (two-term relations collapse under union-find)
followed by dense elimination of the small residual system. Extended by zero
on forest edges, these vectors are cocycles whose classes are a basis of
degree-one cohomology; pairing a cocycle with a mapped cycle reads off one
coordinate of the cycle's homology class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from .systems import LiftedSeries

__all__ = [
    "GridParams",
    "Cocycle",
    "ComparisonSpace",
    "EdgeTooLongError",
    "locate_box",
    "locate_boxes",
    "build_space",
    "build_space_from_boxes",
    "cocycle_basis",
    "route_edge",
    "route_edges_batch",
    "map_cycle",
    "pair",
    "save_space_summary",
    "load_space_summary",
]

_AXIS_BITS = 8
_AXIS_MASK = np.uint64((1 << _AXIS_BITS) - 1)


class EdgeTooLongError(ValueError):
    """Two boxes are not adjacent; the evaluation radius exceeds the box size."""


@dataclass(frozen=True)
class GridParams:
    """Cover parameters: spatial box size, sphere subdivision, state dimension."""

    box_size: float
    sphere_divisions: int
    dim: int

    def __post_init__(self) -> None:
        if self.box_size <= 0:
            raise ValueError("box size must be positive")
        if self.sphere_divisions < 1:
            raise ValueError("sphere subdivision must be at least 1")
        if self.dim < 1:
            raise ValueError("state dimension must be at least 1")

    @property
    def metric_scale(self) -> float:
        """Default tangent weight of the bundle metric (box size times subdivision)."""
        return self.box_size * self.sphere_divisions

    def to_json(self) -> dict:
        return {"box_size": self.box_size, "sphere_divisions": self.sphere_divisions, "dim": self.dim}

    @classmethod
    def from_json(cls, obj: dict) -> "GridParams":
        return cls(obj["box_size"], obj["sphere_divisions"], obj["dim"])


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def locate_boxes(points: np.ndarray, tangents: np.ndarray, grid: GridParams) -> np.ndarray:
    """Lattice coordinates (p, q) of the boxes containing the given bundle points.

    Spatial coordinates are rounded half away from zero; tangents are
    projected radially onto the l-infinity sphere of radius k and rounded,
    so coordinates attaining the sup norm land on +-k exactly.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    tangents = np.atleast_2d(np.asarray(tangents, dtype=np.float64))
    k = grid.sphere_divisions
    p = _round_half_away(points / grid.box_size)
    linf = np.max(np.abs(tangents), axis=1, keepdims=True)
    if np.any(linf == 0):
        raise ValueError("tangent with zero norm cannot be located")
    w = k * tangents / linf
    q = np.clip(_round_half_away(w), -k, k)
    return np.concatenate([p, q], axis=1).astype(np.int64)


def locate_box(point: Sequence[float], tangent: Sequence[float], grid: GridParams) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Single-point version of locate_boxes, returning (p, q) tuples."""
    coords = locate_boxes(np.asarray([point]), np.asarray([tangent]), grid)[0]
    d = grid.dim
    return tuple(int(c) for c in coords[:d]), tuple(int(c) for c in coords[d:])


# --- packed cell keys -------------------------------------------------------

def _pack_bytes(vals: np.ndarray) -> np.ndarray:
    """Pack per-axis byte values (m, axes) into uint64 keys."""
    acc = np.zeros(len(vals), dtype=np.uint64)
    for a in range(vals.shape[1]):
        acc += vals[:, a].astype(np.uint64) << np.uint64(_AXIS_BITS * a)
    return acc


def _unpack_bytes(keys: np.ndarray, n_axes: int) -> np.ndarray:
    out = np.empty((len(keys), n_axes), dtype=np.int64)
    for a in range(n_axes):
        out[:, a] = ((keys >> np.uint64(_AXIS_BITS * a)) & _AXIS_MASK).astype(np.int64)
    return out


def _axis_parity(keys: np.ndarray, axis: int) -> np.ndarray:
    return ((keys >> np.uint64(_AXIS_BITS * axis)) & np.uint64(1)).astype(bool)


def _enumerate_cells(box_bytes: np.ndarray, n_axes: int, cell_dim: int, chunk: int = 1 << 23) -> np.ndarray:
    """Unique packed keys of all cell_dim-faces of the given boxes."""
    base_keys = _pack_bytes(box_bytes)
    deltas = []
    for full_axes in combinations(range(n_axes), cell_dim):
        others = [a for a in range(n_axes) if a not in full_axes]
        for bits in range(1 << len(others)):
            delta = 0
            for a in full_axes:
                delta += 1 << (_AXIS_BITS * a)
            for i, a in enumerate(others):
                if bits >> i & 1:
                    delta += 2 << (_AXIS_BITS * a)
            deltas.append(delta)
    deltas_arr = np.array(deltas, dtype=np.uint64)
    step = max(1, chunk // max(len(base_keys), 1))
    parts = []
    for i in range(0, len(deltas_arr), step):
        block = (base_keys[:, None] + deltas_arr[None, i : i + step]).ravel()
        parts.append(np.unique(block))
    return np.unique(np.concatenate(parts))


def _edge_vertices_keys(edge_keys: np.ndarray, n_axes: int) -> tuple[np.ndarray, np.ndarray]:
    """Packed keys of the two endpoints of each edge."""
    lo = np.empty_like(edge_keys)
    hi = np.empty_like(edge_keys)
    remaining = np.ones(len(edge_keys), dtype=bool)
    for a in range(n_axes):
        odd = _axis_parity(edge_keys, a) & remaining
        if odd.any():
            unit = np.uint64(1 << (_AXIS_BITS * a))
            lo[odd] = edge_keys[odd] - unit
            hi[odd] = edge_keys[odd] + unit
            remaining[odd] = False
    if remaining.any():
        raise ValueError("key without odd axis is not an edge")
    return lo, hi


def _square_edge_keys(square_keys: np.ndarray, n_axes: int) -> np.ndarray:
    """Packed keys of the four boundary edges of each square (m, 4)."""
    out = np.empty((len(square_keys), 4), dtype=np.uint64)
    filled = np.zeros(len(square_keys), dtype=bool)
    for a, b in combinations(range(n_axes), 2):
        mask = _axis_parity(square_keys, a) & _axis_parity(square_keys, b) & ~filled
        if mask.any():
            ua = np.uint64(1 << (_AXIS_BITS * a))
            ub = np.uint64(1 << (_AXIS_BITS * b))
            keys = square_keys[mask]
            out[mask, 0] = keys - ua
            out[mask, 1] = keys + ua
            out[mask, 2] = keys - ub
            out[mask, 3] = keys + ub
            filled[mask] = True
    if not filled.all():
        raise ValueError("key without two odd axes is not a square")
    return out


def _lookup(sorted_keys: np.ndarray, keys: np.ndarray, what: str) -> np.ndarray:
    idx = np.searchsorted(sorted_keys, keys)
    bad = (idx >= len(sorted_keys)) | (sorted_keys[np.minimum(idx, len(sorted_keys) - 1)] != keys)
    if bad.any():
        raise KeyError(f"{what} not present in the complex")
    return idx.astype(np.int64)


# --- GF(2) relation solver ---------------------------------------------------

def _xor_cancel(rows: np.ndarray) -> np.ndarray:
    """Per row keep values occurring an odd number of times; -1 pads, sorted descending."""
    r = np.sort(rows, axis=1)
    a, b, c, d = r[:, 0], r[:, 1], r[:, 2], r[:, 3]
    eq01 = (a == b) & (a >= 0)
    eq12 = (b == c) & (b >= 0)
    eq23 = (c == d) & (c >= 0)
    len0 = 1 + eq01.astype(np.int8) + (eq01 & eq12) + (eq01 & eq12 & eq23)
    len1 = 1 + eq12.astype(np.int8) + (eq12 & eq23)
    len2 = 1 + eq23.astype(np.int8)
    keep = np.empty_like(r, dtype=bool)
    keep[:, 0] = (a >= 0) & (len0 % 2 == 1)
    keep[:, 1] = (b >= 0) & ~eq01 & (len1 % 2 == 1)
    keep[:, 2] = (c >= 0) & ~eq12 & (len2 % 2 == 1)
    keep[:, 3] = (d >= 0) & ~eq23
    out = np.where(keep, r, -1)
    return np.sort(out, axis=1)[:, ::-1]


def _null_space_dense(rows_ints: list[int], n_cols: int) -> list[int]:
    """Null-space basis of the GF(2) row system, rows as int bit sets."""
    pivots: dict[int, int] = {}
    for row in rows_ints:
        cur = row
        while cur:
            low = (cur & -cur).bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = cur
                break
            cur ^= other
    for low in sorted(pivots, reverse=True):
        row = pivots[low]
        for l2 in pivots:
            if l2 != low and (pivots[l2] >> low) & 1:
                pivots[l2] ^= row
    basis = []
    for f in range(n_cols):
        if f in pivots:
            continue
        vec = 1 << f
        for low, row in pivots.items():
            if (row >> f) & 1:
                vec |= 1 << low
        basis.append(vec)
    return basis


def _solve_cocycle_values(n_edges: int, tree_ids: np.ndarray, square_edge_ids: np.ndarray) -> list[np.ndarray]:
    """Boolean value arrays (one per basis vector) solving: sum over each square's
    non-forest edges = 0, with forest edges pinned to zero."""
    rep = np.arange(n_edges, dtype=np.int64)
    zero = np.zeros(n_edges, dtype=bool)
    zero[tree_ids] = True

    rows = square_edge_ids.astype(np.int64, copy=True)
    if rows.size:
        rows[zero[rows]] = -1
        rows = _xor_cancel(rows)

    while rows.size:
        valid = rows >= 0
        mapped = np.where(valid, rep[np.where(valid, rows, 0)], -1)
        z = np.zeros_like(valid)
        z[valid] = zero[mapped[valid]]
        mapped[z] = -1
        rows = _xor_cancel(mapped)
        sizes = (rows >= 0).sum(axis=1)
        ones = rows[sizes == 1, 0]
        pairs = rows[sizes == 2][:, :2]
        rows = np.unique(rows[sizes >= 3], axis=0) if (sizes >= 3).any() else rows[sizes >= 3]
        if not len(ones) and not len(pairs):
            break
        if len(ones):
            zero[np.unique(ones)] = True
        if len(pairs):
            graph = coo_matrix(
                (np.ones(len(pairs), dtype=np.int8), (pairs[:, 0], pairs[:, 1])),
                shape=(n_edges, n_edges),
            )
            n_comp, labels = connected_components(graph, directed=False)
            min_per = np.full(n_comp, n_edges, dtype=np.int64)
            np.minimum.at(min_per, labels, np.arange(n_edges, dtype=np.int64))
            target = min_per[labels]
            rep = target[rep]
            zero_per = np.zeros(n_comp, dtype=bool)
            np.logical_or.at(zero_per, labels, zero)
            zero = zero_per[labels]
        # path-compress the representative map
        while True:
            rep2 = rep[rep]
            if np.array_equal(rep2, rep):
                break
            rep = rep2

    all_edges = np.arange(n_edges, dtype=np.int64)
    reps_all = rep[all_edges]
    alive = ~zero[reps_all]

    residual_vars = np.unique(rows[rows >= 0]) if rows.size else np.empty(0, dtype=np.int64)
    col_of = {int(v): i for i, v in enumerate(residual_vars)}
    row_ints = []
    for row in rows:
        bits = 0
        for v in row:
            if v >= 0:
                bits ^= 1 << col_of[int(v)]
        if bits:
            row_ints.append(bits)
    residual_basis = _null_space_dense(row_ints, len(residual_vars))

    basis_values: list[np.ndarray] = []
    residual_set = set(int(v) for v in residual_vars)
    free_reps = np.unique(reps_all[alive])
    free_reps = np.array([r for r in free_reps if int(r) not in residual_set], dtype=np.int64)
    for r in free_reps:
        vals = np.zeros(n_edges, dtype=bool)
        vals[r] = True
        basis_values.append(vals[reps_all] & alive)
    for vec in residual_basis:
        vals = np.zeros(n_edges, dtype=bool)
        for i, v in enumerate(residual_vars):
            if (vec >> i) & 1:
                vals[v] = True
        basis_values.append(vals[reps_all] & alive)
    return basis_values


# --- the comparison space ----------------------------------------------------

@dataclass(frozen=True)
class Cocycle:
    """A degree-one cocycle as a bit set over edge indices."""

    words: np.ndarray
    support: np.ndarray

    def bit(self, edge_ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(edge_ids, dtype=np.int64)
        return ((self.words[ids >> 6] >> (ids.astype(np.uint64) & np.uint64(63))) & np.uint64(1)).astype(np.uint8)


def _pack_bool(bits: np.ndarray) -> np.ndarray:
    padded = np.zeros(-(-len(bits) // 64) * 64, dtype=bool)
    padded[: len(bits)] = bits
    return np.packbits(padded, bitorder="little").view(np.uint64)


@dataclass(frozen=True)
class ComparisonSpace:
    """Cubical cover of the lifted data with its degree-one cocycle basis."""

    grid: GridParams | None
    n_axes: int
    box_coords: np.ndarray
    box_keys: np.ndarray
    offsets: np.ndarray
    vertex_keys: np.ndarray
    edge_keys: np.ndarray
    square_keys: np.ndarray
    edge_vertices: np.ndarray
    tree_mask: np.ndarray
    b1: int
    cocycles: tuple[Cocycle, ...]

    def __post_init__(self) -> None:
        for name in ("box_coords", "box_keys", "offsets", "vertex_keys", "edge_keys", "square_keys", "edge_vertices", "tree_mask"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    @property
    def n_boxes(self) -> int:
        return len(self.box_keys)

    @property
    def cell_counts(self) -> tuple[int, int, int]:
        return (len(self.vertex_keys), len(self.edge_keys), len(self.square_keys))

    def boundary_edges(self, square_indices: np.ndarray | None = None) -> np.ndarray:
        """Edge indices (m, 4) of the boundary of the selected squares."""
        keys = self.square_keys if square_indices is None else self.square_keys[square_indices]
        face_keys = _square_edge_keys(keys, self.n_axes)
        return _lookup(self.edge_keys, face_keys.ravel(), "edge").reshape(-1, 4)

    def has_boxes(self, coords: np.ndarray) -> np.ndarray:
        keys = _pack_bytes((2 * np.atleast_2d(coords) - self.offsets).astype(np.uint64))
        idx = np.searchsorted(self.box_keys, keys)
        idx = np.minimum(idx, len(self.box_keys) - 1)
        return self.box_keys[idx] == keys

    def summary(self) -> dict:
        return {
            "grid": self.grid.to_json() if self.grid else None,
            "axes": self.n_axes,
            "n_boxes": self.n_boxes,
            "cell_counts": {"0": self.cell_counts[0], "1": self.cell_counts[1], "2": self.cell_counts[2]},
            "b1": self.b1,
            "edge_indexing": "ascending packed doubled-coordinate keys",
            "cocycles": [c.support.tolist() for c in self.cocycles],
        }


def cocycle_basis(space: ComparisonSpace) -> tuple[int, tuple[Cocycle, ...]]:
    """Rank of degree-one cohomology and the stored cocycle basis."""
    return space.b1, space.cocycles


def _verify_cocycles(square_edge_ids: np.ndarray, cocycles: Sequence[Cocycle]) -> None:
    for coc in cocycles:
        total = np.zeros(len(square_edge_ids), dtype=np.uint8)
        for col in range(4):
            total ^= coc.bit(square_edge_ids[:, col])
        if total.any():
            raise AssertionError("computed vector is not a cocycle")


def build_space_from_boxes(box_coords: np.ndarray, grid: GridParams | None = None) -> ComparisonSpace:
    """Build the 2-skeleton complex and cocycle basis over explicit lattice boxes."""
    boxes = np.unique(np.atleast_2d(np.asarray(box_coords, dtype=np.int64)), axis=0)
    if boxes.size == 0:
        raise ValueError("at least one box is required")
    n_axes = boxes.shape[1]
    if n_axes > 8:
        raise ValueError("at most 8 lattice axes are supported")
    offsets = 2 * boxes.min(axis=0)
    widths = 2 * (boxes.max(axis=0) - boxes.min(axis=0)) + 2
    if np.any(widths > 254):
        raise ValueError("lattice extent too large for packed cell keys")

    box_bytes = (2 * boxes - offsets).astype(np.uint64)
    box_keys = _pack_bytes(box_bytes)
    order = np.argsort(box_keys)
    boxes, box_bytes, box_keys = boxes[order], box_bytes[order], box_keys[order]

    vertex_keys = _enumerate_cells(box_bytes, n_axes, 0)
    edge_keys = _enumerate_cells(box_bytes, n_axes, 1)
    square_keys = _enumerate_cells(box_bytes, n_axes, 2) if n_axes >= 2 else np.empty(0, dtype=np.uint64)

    lo_keys, hi_keys = _edge_vertices_keys(edge_keys, n_axes)
    v_lo = _lookup(vertex_keys, lo_keys, "vertex")
    v_hi = _lookup(vertex_keys, hi_keys, "vertex")
    edge_vertices = np.stack([v_lo, v_hi], axis=1).astype(np.int32)

    n0, n1 = len(vertex_keys), len(edge_keys)
    graph = coo_matrix(
        (np.arange(1, n1 + 1, dtype=np.float64), (edge_vertices[:, 0], edge_vertices[:, 1])),
        shape=(n0, n0),
    )
    forest = minimum_spanning_tree(graph)
    tree_ids = (forest.data - 1).astype(np.int64)
    n_comp = connected_components(graph, directed=False)[0]
    if len(tree_ids) != n0 - n_comp:
        raise AssertionError("spanning forest size mismatch")
    tree_mask = np.zeros(n1, dtype=bool)
    tree_mask[tree_ids] = True

    if len(square_keys):
        face_keys = _square_edge_keys(square_keys, n_axes)
        square_edge_ids = _lookup(edge_keys, face_keys.ravel(), "edge").reshape(-1, 4)
    else:
        square_edge_ids = np.empty((0, 4), dtype=np.int64)

    values = _solve_cocycle_values(n1, tree_ids, square_edge_ids)
    cocycles = tuple(Cocycle(_pack_bool(v), np.flatnonzero(v).astype(np.int64)) for v in values)
    _verify_cocycles(square_edge_ids, cocycles)

    return ComparisonSpace(
        grid=grid,
        n_axes=n_axes,
        box_coords=boxes,
        box_keys=box_keys,
        offsets=offsets,
        vertex_keys=vertex_keys,
        edge_keys=edge_keys,
        square_keys=square_keys,
        edge_vertices=edge_vertices,
        tree_mask=tree_mask,
        b1=len(cocycles),
        cocycles=cocycles,
    )


def build_space(lifted: LiftedSeries, grid: GridParams) -> ComparisonSpace:
    """Comparison space over all boxes hit by the lifted series."""
    if len(lifted) == 0:
        raise ValueError("lifted series is empty")
    if lifted.dim != grid.dim:
        raise ValueError("grid dimension does not match the series")
    coords = locate_boxes(lifted.points, lifted.tangents, grid)
    return build_space_from_boxes(coords, grid=grid)


# --- routing data cycles into the space --------------------------------------

def route_edges_batch(
    space: ComparisonSpace, a_coords: np.ndarray, b_coords: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Staircase 1-chains between anchor vertices of box pairs.

    Returns (edge_ids, owner) where owner[i] is the row of the pair that
    produced edge_ids[i]. Axes with offset +1 are walked first in axis order
    (edges are faces of the first box), then offset -1 axes (faces of the
    second box).
    """
    a = np.atleast_2d(np.asarray(a_coords, dtype=np.int64))
    b = np.atleast_2d(np.asarray(b_coords, dtype=np.int64))
    delta = b - a
    if np.any(np.abs(delta) > 1):
        bad = int(np.nonzero(np.abs(delta).max(axis=1) > 1)[0][0])
        raise EdgeTooLongError(
            f"boxes {a[bad].tolist()} and {b[bad].tolist()} are not adjacent; "
            "the evaluation radius is too large for the box size"
        )
    cur = 2 * a - space.offsets
    ids_parts: list[np.ndarray] = []
    owner_parts: list[np.ndarray] = []
    for sign in (1, -1):
        for ax in range(space.n_axes):
            mask = delta[:, ax] == sign
            if not mask.any():
                continue
            sub = cur[mask].copy()
            sub[:, ax] += sign
            keys = _pack_bytes(sub.astype(np.uint64))
            ids_parts.append(_lookup(space.edge_keys, keys, "routed edge"))
            owner_parts.append(np.flatnonzero(mask))
            cur[mask, ax] += 2 * sign
    if not ids_parts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(ids_parts), np.concatenate(owner_parts)


def route_edge(space: ComparisonSpace, a_coords: Sequence[int], b_coords: Sequence[int]) -> np.ndarray:
    """Edge indices of the staircase between two adjacent boxes (empty if equal)."""
    a = np.asarray(a_coords, dtype=np.int64).reshape(1, -1)
    b = np.asarray(b_coords, dtype=np.int64).reshape(1, -1)
    for coords in (a, b):
        if not space.has_boxes(coords)[0]:
            raise ValueError(f"box {coords[0].tolist()} is not in the space")
    ids, _ = route_edges_batch(space, a, b)
    return ids


def _expand_non_adjacent(space: ComparisonSpace, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split box pairs at Chebyshev distance two through a deterministic midbox.

    The tangent-sphere projection is not 1-Lipschitz near corners, so pairs
    within the metric bound can land two sphere cells apart. Routing through
    the (hit) midbox keeps the chain map well-defined: the union of the three
    pairwise-overlapping boxes is simply connected. Beyond distance two, or if
    the midbox was not hit by the data, the pair is a genuine failure.
    """
    delta = b - a
    dist = np.abs(delta).max(axis=1)
    if not (dist > 1).any():
        return a, b
    if (dist > 2).any():
        bad = int(np.nonzero(dist > 2)[0][0])
        raise EdgeTooLongError(
            f"boxes {a[bad].tolist()} and {b[bad].tolist()} are not adjacent; "
            "the evaluation radius is too large for the box size"
        )
    near = dist <= 1
    far = ~near
    mid = a[far] + np.trunc(delta[far] / 2).astype(np.int64)
    hit = space.has_boxes(mid)
    if not hit.all():
        bad = int(np.nonzero(~hit)[0][0])
        raise EdgeTooLongError(
            f"boxes {a[far][bad].tolist()} and {b[far][bad].tolist()} are two cells apart "
            "and the box between them holds no data"
        )
    a_out = np.concatenate([a[near], a[far], mid])
    b_out = np.concatenate([b[near], mid, b[far]])
    return a_out, b_out


def map_cycle(
    space: ComparisonSpace,
    point_boxes: np.ndarray,
    edge_pairs: np.ndarray,
    *,
    check_boundary: bool = True,
) -> np.ndarray:
    """Image of a data-edge cycle as a cubical 1-cycle (sorted edge indices).

    point_boxes holds box coordinates per data point; edge_pairs indexes point
    pairs with even incidence at every point. The image is the mod-2 sum of
    staircase chains of all data edges.
    """
    edge_pairs = np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2)
    if len(edge_pairs) == 0:
        return np.empty(0, dtype=np.int64)
    a = point_boxes[edge_pairs[:, 0]]
    b = point_boxes[edge_pairs[:, 1]]
    a, b = _expand_non_adjacent(space, a, b)
    ids, _ = route_edges_batch(space, a, b)
    uniq, counts = np.unique(ids, return_counts=True)
    cycle = uniq[counts % 2 == 1]
    if check_boundary and len(cycle):
        verts, vcounts = np.unique(space.edge_vertices[cycle].ravel(), return_counts=True)
        if np.any(vcounts % 2):
            raise AssertionError("mapped chain has nonzero boundary")
    return cycle


def pair(cocycle: Cocycle, cycle_edge_ids: np.ndarray) -> int:
    """Parity of the overlap between a cocycle and a cubical 1-cycle."""
    ids = np.asarray(cycle_edge_ids, dtype=np.int64)
    if len(ids) == 0:
        return 0
    return int(cocycle.bit(ids).sum() & 1)


def pairing_vector(space: ComparisonSpace, cycle_edge_ids: np.ndarray) -> int:
    """All cocycle pairings of a cycle as an integer bit set (bit j = cocycle j)."""
    vec = 0
    for j, coc in enumerate(space.cocycles):
        if pair(coc, cycle_edge_ids):
            vec |= 1 << j
    return vec


# --- summary file -------------------------------------------------------------

def save_space_summary(path: str | Path, space: ComparisonSpace, extra: dict | None = None) -> None:
    obj = space.summary()
    if extra:
        obj.update(extra)
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True))


def load_space_summary(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
