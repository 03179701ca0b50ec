"""Segment sampling, signature statistics, oscillation identification and sweeps.

Statistics are pure folds over signature records; segment computation is an
embarrassingly parallel map with deterministic, order-independent aggregation.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .cubical import ComparisonSpace, EdgeTooLongError, GridParams, build_space
from .signatures import SignatureRecord, signature_sweep_for_arrays
from .systems import LiftedSeries

__all__ = [
    "ExperimentPlan",
    "RankTable",
    "FrequencyCurves",
    "InclusionGraph",
    "sample_segments",
    "run_plan",
    "rank_table",
    "frequency_curves",
    "frequent_keys",
    "onset_lengths",
    "inclusion_graph",
    "stability_sweep",
    "write_rank_table_csv",
    "read_rank_table_csv",
    "write_curves_csv",
    "read_curves_csv",
    "write_inclusion_dot",
    "default_workers",
]


@dataclass(frozen=True)
class ExperimentPlan:
    """Sampling plan: which lengths, how many segments, at which radii."""

    lengths: tuple[int, ...]
    per_length: int = 200
    seed: int = 0
    radii: tuple[float, ...] = ()
    metric_scale: float | None = None
    threshold: float = 0.02

    def __post_init__(self) -> None:
        if not self.lengths or any(l <= 0 for l in self.lengths):
            raise ValueError("lengths must be positive")
        if list(self.lengths) != sorted(self.lengths):
            raise ValueError("lengths must be ascending")
        if self.per_length < 1:
            raise ValueError("per_length must be at least 1")
        if not self.radii:
            raise ValueError("at least one evaluation radius is required")

    @property
    def radius(self) -> float:
        return self.radii[0]

    def to_json(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "per_length": self.per_length,
            "seed": self.seed,
            "radii": list(self.radii),
            "metric_scale": self.metric_scale,
            "threshold": self.threshold,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentPlan":
        return cls(
            lengths=tuple(obj["lengths"]),
            per_length=obj["per_length"],
            seed=obj["seed"],
            radii=tuple(obj["radii"]),
            metric_scale=obj.get("metric_scale"),
            threshold=obj.get("threshold", 0.02),
        )


def desk_lengths(stop: int = 500, step: int = 10) -> tuple[int, ...]:
    return tuple(range(step, stop + 1, step))


def sample_segments(n_samples: int, length: int, count: int, seed: int) -> np.ndarray:
    """Uniform segment starts over [0, N - L], with replacement, seeded."""
    if length > n_samples:
        raise ValueError(f"segment length {length} exceeds series length {n_samples}")
    rng = np.random.default_rng(seed)
    return rng.integers(0, n_samples - length + 1, size=count)


# --- parallel execution -------------------------------------------------------

_WORKER_STATE: dict = {}


def _init_worker(points, tangents, space, radii, scale):
    _WORKER_STATE["points"] = points
    _WORKER_STATE["tangents"] = tangents
    _WORKER_STATE["space"] = space
    _WORKER_STATE["radii"] = radii
    _WORKER_STATE["scale"] = scale


def _run_batch(batch: list[tuple[int, int]]) -> list[tuple[int, int, list | None]]:
    points = _WORKER_STATE["points"]
    tangents = _WORKER_STATE["tangents"]
    space = _WORKER_STATE["space"]
    radii = _WORKER_STATE["radii"]
    scale = _WORKER_STATE["scale"]
    out = []
    for start, length in batch:
        try:
            recs = signature_sweep_for_arrays(
                points[start : start + length],
                tangents[start : start + length],
                space,
                radii,
                scale,
                start=start,
            )
        except EdgeTooLongError:
            recs = None
        out.append((start, length, recs))
    return out


def default_workers() -> int:
    env = os.environ.get("CYCSIG_WORKERS")
    if env is not None:
        return max(0, int(env))
    return os.cpu_count() or 1


def run_plan(
    lifted: LiftedSeries,
    space: ComparisonSpace,
    plan: ExperimentPlan,
    workers: int | None = None,
) -> tuple[dict[float, list[SignatureRecord]], list[tuple[int, int]]]:
    """Signatures of all sampled segments at every plan radius.

    Returns (records per radius, failed (start, length) pairs). Segments whose
    chain map is undefined (non-adjacent boxes beyond repair) are isolated and
    reported, not fatal. Identical plans give identical output in any worker
    configuration: sampling is done up front and aggregation is keyed.
    """
    workers = default_workers() if workers is None else workers
    n = len(lifted)
    tasks: list[tuple[int, int]] = []
    for idx, length in enumerate(plan.lengths):
        starts = sample_segments(n, length, plan.per_length, plan.seed + idx)
        tasks.extend((int(s), length) for s in starts)

    results: list[tuple[int, int, list | None]] = []
    if workers <= 1:
        _init_worker(lifted.points, lifted.tangents, space, tuple(plan.radii), plan.metric_scale)
        results = _run_batch(tasks)
    else:
        # big segments spread round-robin so workers stay balanced
        batches: list[list[tuple[int, int]]] = [[] for _ in range(workers * 4)]
        for i, task in enumerate(sorted(tasks, key=lambda t: -t[1])):
            batches[i % len(batches)].append(task)
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(lifted.points, lifted.tangents, space, tuple(plan.radii), plan.metric_scale),
        ) as pool:
            for part in pool.map(_run_batch, batches):
                results.extend(part)

    by_radius: dict[float, list[SignatureRecord]] = {float(r): [] for r in plan.radii}
    failures: list[tuple[int, int]] = []
    for start, length, recs in results:
        if recs is None:
            failures.append((start, length))
            continue
        for rec in recs:
            by_radius[rec.radius].append(rec)
    for r in by_radius:
        by_radius[r].sort(key=lambda rec: (rec.length, rec.start))
    failures.sort(key=lambda t: (t[1], t[0]))
    return by_radius, failures


# --- statistics ----------------------------------------------------------------

@dataclass(frozen=True)
class RankTable:
    """Counts of each cycling rank per segment length."""

    lengths: tuple[int, ...]
    counts: np.ndarray  # (n_lengths, max_rank + 1)

    def __post_init__(self) -> None:
        self.counts.flags.writeable = False

    @property
    def max_rank(self) -> int:
        return self.counts.shape[1] - 1

    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def zero_extinction_length(self) -> int | None:
        """Smallest length with no rank-zero segments."""
        for i, length in enumerate(self.lengths):
            if self.counts[i, 0] == 0:
                return length
        return None

    def positive_onset_length(self) -> int | None:
        """Smallest length with any positive-rank segment."""
        for i, length in enumerate(self.lengths):
            if self.counts[i, 1:].sum() > 0:
                return length
        return None


def rank_table(records: Iterable[SignatureRecord], max_rank: int | None = None) -> RankTable:
    by_length: dict[int, Counter] = {}
    top = 0
    for rec in records:
        by_length.setdefault(rec.length, Counter())[rec.rank] += 1
        top = max(top, rec.rank)
    if max_rank is not None:
        top = max(top, max_rank)
    lengths = tuple(sorted(by_length))
    counts = np.zeros((len(lengths), top + 1), dtype=np.int64)
    for i, length in enumerate(lengths):
        for rank, cnt in by_length[length].items():
            counts[i, rank] = cnt
    return RankTable(lengths, counts)


@dataclass(frozen=True)
class FrequencyCurves:
    """Per-subspace-key frequency of occurrence at each length, for one rank."""

    rank: int
    lengths: tuple[int, ...]
    per_length: int
    curves: dict[str, np.ndarray] = field(default_factory=dict)

    def peak(self, key: str) -> float:
        return float(self.curves[key].max()) if key in self.curves else 0.0


def frequency_curves(records: Iterable[SignatureRecord], rank: int, per_length: int) -> FrequencyCurves:
    by_length: dict[int, Counter] = {}
    lengths_seen = set()
    for rec in records:
        lengths_seen.add(rec.length)
        if rec.rank == rank:
            by_length.setdefault(rec.length, Counter())[rec.key] += 1
    lengths = tuple(sorted(lengths_seen))
    index = {length: i for i, length in enumerate(lengths)}
    curves: dict[str, np.ndarray] = {}
    for length, counter in by_length.items():
        for key, cnt in counter.items():
            curves.setdefault(key, np.zeros(len(lengths)))[index[length]] = cnt / per_length
    return FrequencyCurves(rank, lengths, per_length, curves)


def frequent_keys(curves: FrequencyCurves, threshold: float = 0.02) -> list[str]:
    """Keys whose peak frequency reaches the threshold, most frequent first."""
    chosen = [(k, float(v.max())) for k, v in curves.curves.items() if v.max() >= threshold]
    chosen.sort(key=lambda kv: (-kv[1], kv[0]))
    return [k for k, _ in chosen]


def onset_lengths(curves: FrequencyCurves, threshold: float) -> dict[str, int]:
    """Smallest length at which each key's frequency reaches the threshold."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    out = {}
    for key, vals in curves.curves.items():
        hits = np.nonzero(vals >= threshold)[0]
        if len(hits):
            out[key] = curves.lengths[int(hits[0])]
    return out


@dataclass(frozen=True)
class InclusionGraph:
    """Bipartite containment graph between frequent rank-1 and rank-2 keys."""

    rank1_keys: tuple[str, ...]
    rank2_keys: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]


def inclusion_graph(rank1_keys: Sequence[str], rank2_keys: Sequence[str]) -> InclusionGraph:
    edges = []
    for k1 in rank1_keys:
        v = gf2.Gf2Subspace.from_key(k1)
        for k2 in rank2_keys:
            w = gf2.Gf2Subspace.from_key(k2)
            if gf2.contains(w, v):
                edges.append((k1, k2))
    return InclusionGraph(tuple(rank1_keys), tuple(rank2_keys), tuple(edges))


def stability_sweep(
    lifted: LiftedSeries,
    base_grid: GridParams,
    base_plan: ExperimentPlan,
    variations: Sequence[dict],
    workers: int | None = None,
) -> list[dict]:
    """One result set per configuration variation.

    Each variation may override grid parameters (box_size, sphere_divisions),
    the metric scale, radii, or the seed. Failures are isolated per variation.
    """
    out = []
    for var in variations:
        config = {
            "box_size": var.get("box_size", base_grid.box_size),
            "sphere_divisions": var.get("sphere_divisions", base_grid.sphere_divisions),
            "metric_scale": var.get("metric_scale", base_plan.metric_scale),
            "radii": tuple(var.get("radii", base_plan.radii)),
            "seed": var.get("seed", base_plan.seed),
        }
        entry: dict = {"config": config}
        try:
            grid = GridParams(config["box_size"], config["sphere_divisions"], base_grid.dim)
            space = build_space(lifted, grid)
            plan = replace(
                base_plan,
                metric_scale=config["metric_scale"],
                radii=config["radii"],
                seed=config["seed"],
            )
            by_radius, failures = run_plan(lifted, space, plan, workers=workers)
            recs = by_radius[plan.radius]
            entry["b1"] = space.b1
            entry["rank_table"] = rank_table(recs, max_rank=space.b1)
            entry["curves_rank1"] = frequency_curves(recs, 1, plan.per_length)
            entry["n_failures"] = len(failures)
        except Exception as exc:  # isolate per-run failures
            entry["error"] = f"{type(exc).__name__}: {exc}"
        out.append(entry)
    return out


# --- file formats ---------------------------------------------------------------

def write_rank_table_csv(path: str | Path, table: RankTable) -> None:
    lines = ["L," + ",".join(f"rank{r}" for r in range(table.max_rank + 1))]
    for i, length in enumerate(table.lengths):
        lines.append(str(length) + "," + ",".join(str(int(c)) for c in table.counts[i]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_rank_table_csv(path: str | Path) -> RankTable:
    lines = Path(path).read_text().strip().splitlines()
    lengths = []
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        lengths.append(int(parts[0]))
        rows.append([int(p) for p in parts[1:]])
    return RankTable(tuple(lengths), np.array(rows, dtype=np.int64))


def write_curves_csv(path: str | Path, curves: FrequencyCurves) -> None:
    keys = sorted(curves.curves, key=lambda k: (-curves.curves[k].max(), k))
    lines = ["L," + ",".join(f'"{k}"' for k in keys)]
    for i, length in enumerate(curves.lengths):
        lines.append(str(length) + "," + ",".join(repr(float(curves.curves[k][i])) for k in keys))
    Path(path).write_text("\n".join(lines) + "\n")


def read_curves_csv(path: str | Path, rank: int = 1, per_length: int = 0) -> FrequencyCurves:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    keys = [h.strip('"') for h in header[1:]]
    lengths = []
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        lengths.append(int(parts[0]))
        rows.append([float(p) for p in parts[1:]])
    arr = np.array(rows) if rows else np.zeros((0, len(keys)))
    curves = {k: arr[:, j].copy() for j, k in enumerate(keys)}
    return FrequencyCurves(rank, tuple(lengths), per_length, curves)


def write_inclusion_dot(path: str | Path, graph: InclusionGraph, labels: dict[str, str] | None = None) -> None:
    labels = labels or {}

    def name(key: str) -> str:
        return labels.get(key, key)

    lines = ["graph inclusion {", "  rankdir=BT;"]
    for k in graph.rank1_keys:
        lines.append(f'  "{name(k)}" [level=1];')
    for k in graph.rank2_keys:
        lines.append(f'  "{name(k)}" [level=2];')
    for k1, k2 in graph.edges:
        lines.append(f'  "{name(k1)}" -- "{name(k2)}";')
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")
