"""Independent brute-force oracles used by the test suite.

These deliberately avoid the package's packed-key cell machinery and its
cocycle solver: cells are interval tuples built with itertools, and all ranks
come from dense GF(2) row reduction.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from cycsig import gf2

Cell = tuple[tuple[int, int], ...]  # per axis (lo, hi), hi == lo or lo + 1


def box_cells(box, max_dim=2):
    """All faces of dimension <= max_dim of a lattice box, as interval tuples."""
    n = len(box)
    cells = set()
    for full_axes_count in range(0, max_dim + 1):
        for full_axes in combinations(range(n), full_axes_count):
            degenerate = [a for a in range(n) if a not in full_axes]
            for corners in product((0, 1), repeat=len(degenerate)):
                cell = []
                it = iter(corners)
                for a in range(n):
                    z = box[a]
                    if a in full_axes:
                        cell.append((z, z + 1))
                    else:
                        c = z + next(it)
                        cell.append((c, c))
                cells.add(tuple(cell))
    return cells


def complex_from_boxes(boxes, max_dim=2):
    """Cells by dimension for the union of boxes, deduplicated, sorted."""
    all_cells: set[Cell] = set()
    for box in boxes:
        all_cells |= box_cells(tuple(int(z) for z in box), max_dim)
    by_dim: dict[int, list[Cell]] = {d: [] for d in range(max_dim + 1)}
    for cell in all_cells:
        dim = sum(1 for lo, hi in cell if hi > lo)
        if dim <= max_dim:
            by_dim[dim].append(cell)
    for d in by_dim:
        by_dim[d].sort()
    return by_dim


def cell_faces(cell: Cell):
    """Codimension-one faces of a cell."""
    faces = []
    for a, (lo, hi) in enumerate(cell):
        if hi > lo:
            faces.append(cell[:a] + ((lo, lo),) + cell[a + 1 :])
            faces.append(cell[:a] + ((hi, hi),) + cell[a + 1 :])
    return faces


def boundary_matrix(cells_low: list[Cell], cells_high: list[Cell]) -> gf2.Gf2Matrix:
    """GF(2) boundary matrix with one row per high cell, one column per low cell."""
    index = {c: i for i, c in enumerate(cells_low)}
    rows = []
    for cell in cells_high:
        bits = 0
        for face in cell_faces(cell):
            bits ^= 1 << index[face]
        rows.append(bits)
    return gf2.Gf2Matrix(len(cells_high), len(cells_low), tuple(rows))


def betti_numbers(boxes) -> tuple[int, int]:
    """(b0, b1) of the 2-skeleton over the boxes, via dense GF(2) ranks."""
    by_dim = complex_from_boxes(boxes)
    n0, n1 = len(by_dim[0]), len(by_dim[1])
    d1 = boundary_matrix(by_dim[0], by_dim[1])  # rows = edges as chains over vertices
    _, rank1 = gf2.rref(d1)
    d2 = boundary_matrix(by_dim[1], by_dim[2])
    _, rank2 = gf2.rref(d2)
    b0 = n0 - rank1
    b1 = (n1 - rank1) - rank2
    return b0, b1


def is_cubical_boundary(boxes, edge_cells: set[Cell]) -> bool:
    """Whether a set of edges is a mod-2 boundary in the complex over the boxes."""
    by_dim = complex_from_boxes(boxes)
    index = {c: i for i, c in enumerate(by_dim[1])}
    z = 0
    for cell in edge_cells:
        z ^= 1 << index[cell]
    d2 = boundary_matrix(by_dim[1], by_dim[2])
    _, rank = gf2.rref(d2)
    _, rank_aug = gf2.rref(gf2.Gf2Matrix(d2.n_rows + 1, d2.n_cols, d2.rows + (z,)))
    return rank_aug == rank


# --- brute-force clique-complex homology for point clouds ---------------------

def vr_h1_dimension(dists: np.ndarray, radius: float) -> int:
    """dim H1 of the Vietoris-Rips clique complex at the given radius."""
    n = len(dists)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if dists[i, j] <= radius]
    edge_index = {e: idx for idx, e in enumerate(edges)}
    triangles = [
        (i, j, k)
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
        if max(dists[i, j], dists[i, k], dists[j, k]) <= radius
    ]
    d1 = gf2.Gf2Matrix(len(edges), n, tuple((1 << i) ^ (1 << j) for i, j in edges))
    _, rank1 = gf2.rref(d1)
    d2_rows = []
    for i, j, k in triangles:
        bits = (1 << edge_index[(i, j)]) ^ (1 << edge_index[(i, k)]) ^ (1 << edge_index[(j, k)])
        d2_rows.append(bits)
    d2 = gf2.Gf2Matrix(len(triangles), len(edges), tuple(d2_rows))
    _, rank2 = gf2.rref(d2)
    return (len(edges) - rank1) - rank2
