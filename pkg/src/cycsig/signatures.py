"""Signature subspaces of segments: spans of cocycle-pairing vectors.

A segment's persistent 1-cycles alive at the evaluation radius are mapped
into the comparison space; their cocycle pairing vectors span a GF(2)
subspace whose dimension is the segment's cycling rank.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .cubical import ComparisonSpace, locate_boxes, map_cycle, pairing_vector
from .persistence import SegmentView, bars_alive, build_filtration_from_points, persist_h1

__all__ = [
    "SignatureRecord",
    "signature",
    "signature_for_arrays",
    "signature_sweep",
    "save_records",
    "load_records",
]


@dataclass(frozen=True)
class SignatureRecord:
    """Signature of one segment at one evaluation radius."""

    start: int
    length: int
    radius: float
    subspace: gf2.Gf2Subspace

    @property
    def rank(self) -> int:
        return self.subspace.rank

    @property
    def key(self) -> str:
        return self.subspace.key()

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "length": self.length,
            "radius": self.radius,
            "rank": self.rank,
            "key": self.key,
            "subspace": self.subspace.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SignatureRecord":
        return cls(obj["start"], obj["length"], obj["radius"], gf2.Gf2Subspace.from_json(obj["subspace"]))


def _check_radius(space: ComparisonSpace, radius: float) -> None:
    if space.grid is None:
        raise ValueError("signatures need a comparison space built over a grid")
    if radius > space.grid.box_size:
        raise ValueError(
            f"evaluation radius {radius} exceeds the box size {space.grid.box_size}; "
            "the chain map into the space is only defined up to the box size"
        )


def _alive_vectors(space, boxes, barcode, radius, cache):
    vecs = []
    for bar_idx, bar in enumerate(barcode.bars):
        if not (bar.birth <= radius < bar.death):
            continue
        if bar_idx not in cache:
            cycle = map_cycle(space, boxes, bar.representative)
            cache[bar_idx] = pairing_vector(space, cycle)
        vecs.append(cache[bar_idx])
    return vecs


def signature_for_arrays(
    points: np.ndarray,
    tangents: np.ndarray,
    space: ComparisonSpace,
    radius: float,
    scale: float | None = None,
    *,
    start: int = 0,
) -> SignatureRecord:
    """Signature of an explicit (L, d) point/tangent block."""
    records = signature_sweep_for_arrays(points, tangents, space, [radius], scale, start=start)
    return records[0]


def signature_sweep_for_arrays(
    points: np.ndarray,
    tangents: np.ndarray,
    space: ComparisonSpace,
    radii: Sequence[float],
    scale: float | None = None,
    *,
    start: int = 0,
) -> list[SignatureRecord]:
    """Signatures at several radii; one filtration built at the largest radius."""
    if not len(radii):
        return []
    for r in radii:
        _check_radius(space, r)
    if scale is None:
        scale = space.grid.metric_scale
    r_max = max(radii)
    filtration = build_filtration_from_points(points, tangents, scale, r_max)
    barcode = persist_h1(filtration)
    boxes = locate_boxes(points, tangents, space.grid)
    cache: dict[int, int] = {}
    out = []
    for r in radii:
        bars_alive(barcode, r)  # validates r <= r_max
        vecs = _alive_vectors(space, boxes, barcode, r, cache)
        subspace = gf2.span_ints(vecs, space.b1)
        out.append(SignatureRecord(start, len(points), float(r), subspace))
    return out


def signature(seg: SegmentView, space: ComparisonSpace, radius: float, scale: float | None = None) -> SignatureRecord:
    """Signature of a segment of a lifted series at one evaluation radius."""
    return signature_for_arrays(seg.points(), seg.tangents(), space, radius, scale, start=seg.start)


def signature_sweep(
    seg: SegmentView, space: ComparisonSpace, radii: Sequence[float], scale: float | None = None
) -> list[SignatureRecord]:
    return signature_sweep_for_arrays(seg.points(), seg.tangents(), space, radii, scale, start=seg.start)


def save_records(path: str | Path, records: Iterable[SignatureRecord]) -> None:
    """One JSON record per line."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")


def load_records(path: str | Path) -> list[SignatureRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(SignatureRecord.from_json(json.loads(line)))
    return out
