"""Vietoris-Rips H1 persistence of lifted segments, with representative cycles.

The filtration value of an edge is the bundle metric
max(|p - q|_2, C |v - w|_2); a triangle enters at its largest edge value.
Reduction is the standard GF(2) column algorithm with explicit cycle columns,
so that for every radius the representatives of the bars alive at that radius
form a homology basis of the complex at that radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .systems import LiftedSeries

__all__ = [
    "SegmentView",
    "Filtration",
    "Bar",
    "Barcode",
    "utb_distance",
    "segment_points",
    "build_filtration",
    "build_filtration_from_points",
    "persist_h1",
    "bars_alive",
]


@dataclass(frozen=True)
class SegmentView:
    """A consecutive block of samples of a lifted series."""

    series: LiftedSeries
    start: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("segment length must be at least 1")
        if self.start < 0 or self.start + self.length > len(self.series):
            raise ValueError("segment indices out of range")

    def points(self) -> np.ndarray:
        return self.series.points[self.start : self.start + self.length]

    def tangents(self) -> np.ndarray:
        return self.series.tangents[self.start : self.start + self.length]


def utb_distance(u: Sequence[float], w: Sequence[float], scale: float, dim: int | None = None) -> float:
    """Bundle metric between two (point, tangent) samples.

    Inputs are concatenated (point, tangent) vectors; `scale` weights the
    tangent part: max(|p - q|, scale * |v - w|).
    """
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if dim is None:
        if len(u) % 2:
            raise ValueError("concatenated sample must have even length")
        dim = len(u) // 2
    base = float(np.linalg.norm(u[:dim] - w[:dim]))
    tang = float(np.linalg.norm(u[dim:] - w[dim:]))
    return max(base, scale * tang)


def _distance_matrix(points: np.ndarray, tangents: np.ndarray, scale: float) -> np.ndarray:
    base = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    tang = np.linalg.norm(tangents[:, None, :] - tangents[None, :, :], axis=2)
    return np.maximum(base, scale * tang)


@dataclass(frozen=True)
class Filtration:
    """Edges and triangles up to the cutoff, sorted by (value, vertex tuple)."""

    n_vertices: int
    edges: np.ndarray
    edge_values: np.ndarray
    triangles: np.ndarray
    triangle_values: np.ndarray
    r_max: float

    def __post_init__(self) -> None:
        for name in ("edges", "edge_values", "triangles", "triangle_values"):
            getattr(self, name).flags.writeable = False


def build_filtration_from_points(points: np.ndarray, tangents: np.ndarray, scale: float, r_max: float) -> Filtration:
    """All pairs and triples within the cutoff of the bundle metric."""
    if r_max <= 0:
        raise ValueError("cutoff must be positive")
    n = len(points)
    dists = _distance_matrix(points, tangents, scale)

    iu, ju = np.triu_indices(n, k=1)
    vals = dists[iu, ju]
    keep = vals <= r_max
    edges = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int32)
    edge_values = vals[keep]
    order = np.lexsort((edges[:, 1], edges[:, 0], edge_values))
    edges, edge_values = edges[order], edge_values[order]

    adj = dists <= r_max
    np.fill_diagonal(adj, False)
    tri_list = []
    tri_vals = []
    for i, j in edges:
        ks = np.nonzero(adj[i] & adj[j])[0]
        ks = ks[ks > j]
        if len(ks):
            tri_list.append(np.stack([np.full(len(ks), i), np.full(len(ks), j), ks], axis=1))
            tri_vals.append(np.maximum(dists[i, ks], np.maximum(dists[j, ks], dists[i, j])))
    if tri_list:
        triangles = np.concatenate(tri_list).astype(np.int32)
        triangle_values = np.concatenate(tri_vals)
        order = np.lexsort((triangles[:, 2], triangles[:, 1], triangles[:, 0], triangle_values))
        triangles, triangle_values = triangles[order], triangle_values[order]
    else:
        triangles = np.empty((0, 3), dtype=np.int32)
        triangle_values = np.empty(0)
    return Filtration(n, edges, edge_values, triangles, triangle_values, r_max)


def build_filtration(seg: SegmentView, scale: float, r_max: float) -> Filtration:
    return build_filtration_from_points(seg.points(), seg.tangents(), scale, r_max)


@dataclass(frozen=True)
class Bar:
    """One H1 interval with a representative cycle in data-edge pairs."""

    birth: float
    death: float  # inf if still alive at the cutoff
    representative: np.ndarray  # (m, 2) vertex index pairs

    def __post_init__(self) -> None:
        self.representative.flags.writeable = False


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Bar, ...]
    r_max: float
    n_vertices: int = 0

    def __len__(self) -> int:
        return len(self.bars)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def persist_h1(filtration: Filtration) -> Barcode:
    """H1 barcode with representatives via GF(2) column reduction.

    Cycle-creating edges contribute explicit creator cycles (forest path plus
    the edge); triangle columns are reduced against each other, and a column
    ending at the unpaired edge e yields the bar [value(e), value(t)) with the
    reduced boundary chain as its representative. Zero-length bars are
    dropped; unkilled classes get death = inf.
    """
    n = filtration.n_vertices
    edges = filtration.edges
    n_edges = len(edges)

    # forest phase: classify cycle-creating edges, keep tree adjacency for creator cycles
    uf = _UnionFind(n)
    tree_adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(n)}
    creators: list[int] = []
    depth = {}

    def tree_path(u: int, v: int) -> list[tuple[int, int]]:
        # BFS in the current forest; segments are small
        from collections import deque

        queue = deque([u])
        prev: dict[int, tuple[int, int] | None] = {u: None}
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for nbr, eidx in tree_adj[x]:
                if nbr not in prev:
                    prev[nbr] = (x, eidx)
                    queue.append(nbr)
        path = []
        x = v
        while prev[x] is not None:
            y, eidx = prev[x]
            path.append(eidx)
            x = y
        return path

    creator_cycles: dict[int, int] = {}  # edge idx -> cycle as bit set over edge order
    for idx in range(n_edges):
        i, j = int(edges[idx, 0]), int(edges[idx, 1])
        if uf.union(i, j):
            tree_adj[i].append((j, idx))
            tree_adj[j].append((i, idx))
        else:
            cyc = 1 << idx
            for eidx in tree_path(i, j):
                cyc ^= 1 << eidx
            creator_cycles[idx] = cyc
            creators.append(idx)

    # triangle reduction over GF(2), columns as bit sets over edge order
    edge_order_index = {}
    # map (i, j) to filtration position for triangle boundaries
    for idx in range(n_edges):
        edge_order_index[(int(edges[idx, 0]), int(edges[idx, 1]))] = idx

    low_to_col: dict[int, int] = {}
    deaths: dict[int, float] = {}
    death_reps: dict[int, int] = {}
    for t_idx in range(len(filtration.triangles)):
        i, j, k = (int(v) for v in filtration.triangles[t_idx])
        col = (
            (1 << edge_order_index[(i, j)])
            ^ (1 << edge_order_index[(i, k)])
            ^ (1 << edge_order_index[(j, k)])
        )
        while col:
            low = col.bit_length() - 1
            other = low_to_col.get(low)
            if other is None:
                low_to_col[low] = col
                if low in creator_cycles:
                    deaths[low] = float(filtration.triangle_values[t_idx])
                    death_reps[low] = col
                break
            col ^= other

    bars = []
    for idx in creators:
        birth = float(filtration.edge_values[idx])
        death = deaths.get(idx, np.inf)
        if not death > birth:
            continue
        rep_bits = death_reps.get(idx, creator_cycles[idx])
        members = [m for m in range(rep_bits.bit_length()) if (rep_bits >> m) & 1]
        rep = edges[np.array(members, dtype=np.int64)].astype(np.int64)
        bars.append(Bar(birth, death, rep))
    bars.sort(key=lambda b: (b.birth, b.death))
    return Barcode(tuple(bars), filtration.r_max, n)


def bars_alive(barcode: Barcode, radius: float) -> list[Bar]:
    """Bars with birth <= radius < death; radius must not exceed the cutoff."""
    if radius > barcode.r_max:
        raise ValueError("evaluation radius exceeds the filtration cutoff")
    return [b for b in barcode.bars if b.birth <= radius < b.death]


def segment_points(seg: SegmentView) -> tuple[np.ndarray, np.ndarray]:
    return seg.points(), seg.tangents()
