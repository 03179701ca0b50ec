"""Command line pipeline: generate / space / compute / stats / graph / sweep / plot / run."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, gf2
from .cubical import GridParams, build_space, load_space_summary, save_space_summary
from .experiments import (
    ExperimentPlan,
    desk_lengths,
    frequency_curves,
    frequent_keys,
    inclusion_graph,
    onset_lengths,
    rank_table,
    read_curves_csv,
    read_rank_table_csv,
    run_plan,
    stability_sweep,
    write_curves_csv,
    write_inclusion_dot,
    write_rank_table_csv,
)
from .plots import curves_svg, stacked_bar_svg, write_svg
from .signatures import load_records, save_records
from .systems import SystemSpec, generate_lifted, load_trajectory, save_trajectory, system_preset

# reference configuration per system: cover, evaluation radius, metric scale
# (None = box size times sphere subdivision)
SYSTEM_DEFAULTS = {
    "lorenz": {"box_size": 8.0, "sphere_divisions": 3, "radius": 5.0, "metric_scale": None},
    "doublewell": {"box_size": 0.2, "sphere_divisions": 3, "radius": 0.18, "metric_scale": None},
    "dadras": {"box_size": 4.0, "sphere_divisions": 3, "radius": 1.8, "metric_scale": 4.0},
}


def _parse_lengths(text: str) -> tuple[int, ...]:
    """Either "start:step:stop" (inclusive) or a comma list."""
    if ":" in text:
        start, step, stop = (int(p) for p in text.split(":"))
        return tuple(range(start, stop + 1, step))
    return tuple(int(p) for p in text.split(","))


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_generate(args) -> int:
    spec = system_preset(args.system)
    lifted = generate_lifted(
        spec,
        args.points,
        seed=args.seed,
        transient=args.transient,
        sde_dt=args.sde_dt,
        sde_thin=args.sde_thin,
        rtol=args.rtol,
        jacobian_tangents=args.jacobian_tangents,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_trajectory(out, lifted, extra_meta={"transient": args.transient, "version": __version__})
    print(f"wrote {len(lifted)} samples to {out}")
    return 0


def cmd_space(args) -> int:
    lifted = load_trajectory(args.input)
    grid = GridParams(args.r, args.k, lifted.dim)
    space = build_space(lifted, grid)
    save_space_summary(args.out, space, extra={"version": __version__, "trajectory": str(args.input)})
    print(f"boxes {space.n_boxes} cells {space.cell_counts} b1 {space.b1} -> {args.out}")
    return 0


def _space_for_compute(traj_path: str, space_path: str | None, grid: GridParams):
    lifted = load_trajectory(traj_path)
    space = build_space(lifted, grid)
    if space_path:
        summary = load_space_summary(space_path)
        counts = summary["cell_counts"]
        got = space.cell_counts
        if (counts["0"], counts["1"], counts["2"]) != got or summary["b1"] != space.b1:
            raise SystemExit("space summary does not match the trajectory and grid")
    return lifted, space


def cmd_compute(args) -> int:
    grid_src = load_space_summary(args.space)["grid"] if args.space else None
    if grid_src:
        grid = GridParams.from_json(grid_src)
    else:
        if args.r is None or args.k is None:
            raise SystemExit("either --space or both --r and --k are required")
        lifted_probe = load_trajectory(args.traj)
        grid = GridParams(args.r, args.k, lifted_probe.dim)
    lifted, space = _space_for_compute(args.traj, args.space, grid)
    radii = tuple(float(r) for r in args.radii.split(",")) if args.radii else (args.radius,)
    plan = ExperimentPlan(
        lengths=_parse_lengths(args.lengths),
        per_length=args.per_length,
        seed=args.seed,
        radii=radii,
        metric_scale=args.scale,
    )
    by_radius, failures = run_plan(lifted, space, plan, workers=args.workers)
    records = [rec for r in plan.radii for rec in by_radius[float(r)]]
    save_records(args.out, records)
    if args.failures:
        Path(args.failures).write_text(json.dumps([{"start": s, "length": l} for s, l in failures], indent=2))
    print(f"wrote {len(records)} records ({len(failures)} failed segments) to {args.out}")
    return 0


def cmd_stats(args) -> int:
    records = load_records(args.records)
    radius = args.radius if args.radius is not None else min(r.radius for r in records)
    records = [r for r in records if r.radius == radius]
    per_length = args.per_length
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    table = rank_table(records)
    write_rank_table_csv(outdir / "ranks.csv", table)
    for rank in (1, 2):
        curves = frequency_curves(records, rank, per_length)
        write_curves_csv(outdir / f"curves_rank{rank}.csv", curves)
    print(f"stats at radius {radius} -> {outdir}")
    return 0


def cmd_graph(args) -> int:
    records = load_records(args.records)
    radius = args.radius if args.radius is not None else min(r.radius for r in records)
    records = [r for r in records if r.radius == radius]
    c1 = frequency_curves(records, 1, args.per_length)
    c2 = frequency_curves(records, 2, args.per_length)
    keys1 = frequent_keys(c1, args.threshold)
    keys2 = frequent_keys(c2, args.threshold)
    labels = {k: f"v{i + 1}" for i, k in enumerate(keys1)}
    labels.update({k: f"w{i + 1}" for i, k in enumerate(keys2)})
    write_inclusion_dot(args.out, inclusion_graph(keys1, keys2), labels)
    print(f"{len(keys1)} rank-1 and {len(keys2)} rank-2 frequent signatures -> {args.out}")
    return 0


def cmd_plot(args) -> int:
    path = Path(args.input)
    header = path.read_text().splitlines()[0] if path.stat().st_size else ""
    kind = args.kind
    if kind == "auto":
        kind = "ranks" if header.startswith("L,rank") else "curves"
    if kind == "ranks":
        svg = stacked_bar_svg(read_rank_table_csv(path))
    else:
        svg = curves_svg(read_curves_csv(path))
    write_svg(args.out, svg)
    print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    config = json.loads(Path(args.config).read_text())
    lifted = load_trajectory(config["trajectory"])
    base_grid = GridParams(config["grid"]["box_size"], config["grid"]["sphere_divisions"], lifted.dim)
    plan = ExperimentPlan.from_json(config["plan"])
    results = stability_sweep(lifted, base_grid, plan, config["variations"], workers=args.workers)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    index = []
    for i, entry in enumerate(results):
        name = f"variation_{i:03d}"
        meta = {"config": entry["config"], "name": name}
        if "error" in entry:
            meta["error"] = entry["error"]
        else:
            meta["b1"] = entry["b1"]
            meta["n_failures"] = entry["n_failures"]
            write_rank_table_csv(outdir / f"{name}_ranks.csv", entry["rank_table"])
            write_curves_csv(outdir / f"{name}_curves_rank1.csv", entry["curves_rank1"])
        index.append(meta)
    (outdir / "sweep.json").write_text(json.dumps(index, indent=2, sort_keys=True))
    print(f"{len(results)} variations -> {outdir}")
    return 0


def run_pipeline(config: dict, outdir: Path, workers: int | None = None) -> dict:
    """All stages on one configuration; returns the manifest."""
    outdir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"version": __version__, "config": config, "stages": {}, "files": {}}
    name = config["system"] if isinstance(config["system"], str) else None
    defaults = SYSTEM_DEFAULTS.get(name, {})
    spec = system_preset(name) if name else SystemSpec.from_json(config["system"])

    grid_cfg = config.get("grid", {})
    box_size = grid_cfg.get("box_size", defaults.get("box_size"))
    sphere_divisions = grid_cfg.get("sphere_divisions", defaults.get("sphere_divisions", 3))
    radius = config.get("radius", defaults.get("radius"))
    radii = tuple(config.get("radii", [radius]))
    scale = config.get("metric_scale", defaults.get("metric_scale"))
    if box_size is None or radii[0] is None:
        raise ValueError("config must provide grid box_size and radius (or use a known system preset)")
    if any(r > box_size for r in radii):
        raise ValueError(f"evaluation radii {list(radii)} exceed the box size {box_size}")

    t0 = time.time()
    lifted = generate_lifted(
        spec,
        config.get("n_points", 200_000),
        seed=config.get("seed", 0),
        transient=config.get("transient", 1000),
        sde_dt=config.get("sde_dt", 0.01),
        sde_thin=config.get("sde_thin", 10),
        rtol=config.get("rtol", 1e-6),
    )
    traj_path = outdir / "trajectory.npy"
    save_trajectory(traj_path, lifted, extra_meta={"version": __version__})
    manifest["stages"]["generate"] = round(time.time() - t0, 3)

    t0 = time.time()
    grid = GridParams(box_size, sphere_divisions, lifted.dim)
    space = build_space(lifted, grid)
    save_space_summary(outdir / "space.json", space, extra={"version": __version__})
    manifest["stages"]["space"] = round(time.time() - t0, 3)
    manifest["b1"] = space.b1

    t0 = time.time()
    plan_cfg = config.get("plan", {})
    lengths = plan_cfg.get("lengths", "10:10:500")
    plan = ExperimentPlan(
        lengths=_parse_lengths(lengths) if isinstance(lengths, str) else tuple(lengths),
        per_length=plan_cfg.get("per_length", 200),
        seed=plan_cfg.get("seed", 0),
        radii=radii,
        metric_scale=scale,
        threshold=plan_cfg.get("threshold", 0.02),
    )
    by_radius, failures = run_plan(lifted, space, plan, workers=workers)
    records = [rec for r in plan.radii for rec in by_radius[float(r)]]
    save_records(outdir / "records.jsonl", records)
    (outdir / "failures.json").write_text(
        json.dumps([{"start": s, "length": l} for s, l in failures], indent=2)
    )
    manifest["stages"]["compute"] = round(time.time() - t0, 3)
    manifest["n_failures"] = len(failures)

    t0 = time.time()
    primary = by_radius[float(plan.radius)]
    table = rank_table(primary, max_rank=space.b1)
    write_rank_table_csv(outdir / "ranks.csv", table)
    c1 = frequency_curves(primary, 1, plan.per_length)
    c2 = frequency_curves(primary, 2, plan.per_length)
    write_curves_csv(outdir / "curves_rank1.csv", c1)
    write_curves_csv(outdir / "curves_rank2.csv", c2)
    keys1 = frequent_keys(c1, plan.threshold)
    keys2 = frequent_keys(c2, plan.threshold)
    labels = {k: f"v{i + 1}" for i, k in enumerate(keys1)}
    labels.update({k: f"w{i + 1}" for i, k in enumerate(keys2)})
    write_inclusion_dot(outdir / "inclusion.dot", inclusion_graph(keys1, keys2), labels)
    manifest["stages"]["stats"] = round(time.time() - t0, 3)

    t0 = time.time()
    write_svg(outdir / "ranks.svg", stacked_bar_svg(table))
    write_svg(outdir / "curves_rank1.svg", curves_svg(c1, labels))
    write_svg(outdir / "curves_rank2.svg", curves_svg(c2, labels))
    manifest["stages"]["plot"] = round(time.time() - t0, 3)

    for path in sorted(outdir.iterdir()):
        if path.name != "manifest.json" and path.is_file():
            manifest["files"][path.name] = _sha256(path)
    content = "\n".join(f"{k}:{v}" for k, v in sorted(manifest["files"].items()))
    manifest["content_digest"] = hashlib.sha256(content.encode()).hexdigest()
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def cmd_run(args) -> int:
    config = json.loads(Path(args.config).read_text())
    try:
        manifest = run_pipeline(config, Path(args.outdir), workers=args.workers)
    except Exception as exc:
        report = {"error": f"{type(exc).__name__}: {exc}"}
        Path(args.outdir).mkdir(parents=True, exist_ok=True)
        (Path(args.outdir) / "error.json").write_text(json.dumps(report, indent=2))
        print(json.dumps(report), file=sys.stderr)
        return 1
    print(f"pipeline complete; content digest {manifest['content_digest'][:16]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cycsig", description="oscillation analysis via signature subspaces")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="integrate a system and lift to the unit tangent bundle")
    p.add_argument("--system", required=True, choices=sorted(SYSTEM_DEFAULTS))
    p.add_argument("--points", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transient", type=int, default=1000)
    p.add_argument("--sde-dt", type=float, default=0.01)
    p.add_argument("--sde-thin", type=int, default=10)
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--jacobian-tangents", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("space", help="build the comparison space over a trajectory")
    p.add_argument("--input", required=True)
    p.add_argument("--r", type=float, required=True, help="spatial box size")
    p.add_argument("--k", type=int, required=True, help="sphere subdivision")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("compute", help="signatures of sampled segments")
    p.add_argument("--traj", required=True)
    p.add_argument("--space", default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--lengths", default="10:10:500")
    p.add_argument("--per-length", type=int, default=200)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--radii", default=None, help="comma list; overrides --radius")
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--failures", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("stats", help="rank table and frequency curve CSVs from records")
    p.add_argument("--records", required=True)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--per-length", type=int, required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("graph", help="inclusion graph of frequent signatures (DOT)")
    p.add_argument("--records", required=True)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--per-length", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("sweep", help="stability sweep over configuration variations")
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG from a rank table or curves CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=["auto", "ranks", "curves"], default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
