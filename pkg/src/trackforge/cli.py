"""Command-line entry point: ``trackforge <command> [--config FILE] [overrides]``.

Every command writes ``resolved_config.json`` into its output directory;
passing that file back with ``--config`` reproduces the run.

Exit codes: 0 success (possibly with warnings), 2 usage or config error,
1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import asdict, replace
from pathlib import Path

from trackforge.errors import ConfigError, TrackforgeError
from trackforge.sched import (
    OrderingPolicy,
    ProtocolConfig,
    TriplesConfig,
    read_manifest,
    run_tasks,
    validate_config,
    write_trace_csv,
)
from trackforge.sched.live import DISTRIBUTIONS
from trackforge.sched.tasks import ORDERING_KINDS, message_count
from trackforge.sim import (
    TABLE_CELLS,
    CostModel,
    benchmark_sweep,
    simulate_self_sched,
    simulate_static,
    synth_workload,
    trace_metrics,
)
from trackforge.sim.bench import render_markdown_table, write_series_csv, write_sweep_csv
from trackforge.sim.metrics import write_ecdf_csv
from trackforge.sim.workload import DEFAULT_PARAMS, Workload

logger = logging.getLogger("trackforge")

COMMANDS = ("organize", "archive", "segment", "querygen", "bench", "simulate")

COMMON = {
    "out": None,
    "workers": None,
    "nodes": None,
    "nppn": 8,
    "ordering": "largest_first",
    "distribution": "self_sched",
    "tasks_per_message": 1,
    "poll_interval": 0.3,
    "seed": 0,
}
COST = {"fixed_overhead_s": 5.0, "seconds_per_mb": 2.0, "node_contention_factor": 0.25}
DEFAULTS = {
    "organize": {"input": None, "registry": None, "ceiling_ft": None},
    "archive": {"input": None, "strict": False},
    "segment": {"input": None, "dem": None, "airspace": None, "max_gap_s": 300.0,
                "min_points": 10, "rate_hz": 1.0},
    "querygen": {"aerodromes": None, "dem": None, "airspace": None, "first_month": "2019-01",
                 "last_month": "2020-02", "days_per_month": 14, "group_count": 8,
                 "grid_deg": 0.05, "max_span_deg": 2.0, "radius_m": 14816.0, "n_vertices": 64,
                 "max_dist_m": 14816.0, "agl_floor_ft": 0.0, "agl_ceiling_ft": 5100.0,
                 "hard_ceiling_ft": 12500.0, "msl_cap_ft": None},
    "bench": {"workload": "gaussian", "manifest": None, "n_tasks": None, "cells": None,
              "policies": "largest_first,chronological,random", "seeds": 1, "compare": None,
              "tpm_sweep": None, **COST},
    "simulate": {"workload": "gaussian", "manifest": None, "n_tasks": None, **COST},
}


# --- configuration ---------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trackforge", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path)
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--workers", type=int)
        sp.add_argument("--nodes", type=int)
        sp.add_argument("--nppn", type=int)
        sp.add_argument("--ordering", choices=ORDERING_KINDS)
        sp.add_argument("--distribution", choices=DISTRIBUTIONS + ("self-sched",))
        sp.add_argument("--tasks-per-message", type=int)
        sp.add_argument("--poll-interval", type=float)
        sp.add_argument("--seed", type=int)
        if name in ("organize", "archive", "segment"):
            sp.add_argument("--input", type=Path)
        if name == "organize":
            sp.add_argument("--registry", type=Path, action="append")
            sp.add_argument("--ceiling-ft", type=float)
        if name == "archive":
            sp.add_argument("--strict", action="store_const", const=True)
        if name in ("segment", "querygen"):
            sp.add_argument("--dem", type=Path)
            sp.add_argument("--airspace", type=Path)
        if name == "querygen":
            sp.add_argument("--aerodromes", type=Path)
            sp.add_argument("--group-count", type=int)
            sp.add_argument("--first-month")
            sp.add_argument("--last-month")
            sp.add_argument("--days-per-month", type=int)
            sp.add_argument("--msl-cap-ft", type=float)
        if name in ("bench", "simulate"):
            sp.add_argument("--workload", help="gaussian, heavy_tail, clustered or manifest")
            sp.add_argument("--manifest", type=Path)
            sp.add_argument("--n-tasks", type=int)
        if name == "bench":
            sp.add_argument("--cells", help="comma list of WORKERSxNPPN, e.g. 255x8,511x16")
            sp.add_argument("--policies")
            sp.add_argument("--seeds", type=int)
            sp.add_argument("--compare", help="static partitions to contrast, e.g. block,cyclic")
            sp.add_argument("--tpm-sweep", help="comma list of tasks-per-message values")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = {"command": args.command, **COMMON, **DEFAULTS[args.command]}
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        if loaded.get("command", args.command) != args.command:
            raise ConfigError(f"config was written for {loaded['command']!r}, not {args.command!r}")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in cfg and key != "command" and value is not None:
            cfg[key] = value
    for key, value in cfg.items():
        if isinstance(value, Path):
            cfg[key] = str(value)
        elif isinstance(value, list):
            cfg[key] = [str(v) if isinstance(v, Path) else v for v in value]
    cfg["distribution"] = cfg["distribution"].replace("-", "_")
    if isinstance(cfg.get("registry"), str):
        cfg["registry"] = [cfg["registry"]]
    if cfg["out"] is None:
        raise ConfigError("an output directory is required (--out)")
    return cfg


def _require(cfg: dict, *keys: str, exists: bool = True) -> None:
    for key in keys:
        value = cfg.get(key)
        if value is None:
            raise ConfigError(f"missing required setting {key!r}")
        if exists:
            for v in value if isinstance(value, list) else [value]:
                if not Path(v).exists():
                    raise ConfigError(f"{key}: {v} does not exist")


def n_workers(cfg: dict) -> int:
    """Explicit --workers wins; else nodes x nppn minus the manager; else 1."""
    if cfg["workers"] is not None:
        if cfg["workers"] < 1:
            raise ConfigError("workers must be >= 1")
        return cfg["workers"]
    if cfg["nodes"] is not None:
        return validate_config(TriplesConfig(cfg["nodes"], cfg["nppn"])).worker_count
    return 1


def protocol(cfg: dict) -> ProtocolConfig:
    return ProtocolConfig(cfg["poll_interval"], cfg["tasks_per_message"])


def policy(cfg: dict) -> OrderingPolicy:
    return OrderingPolicy(cfg["ordering"], cfg["seed"])


def cost_model(cfg: dict) -> CostModel:
    return CostModel(cfg["fixed_overhead_s"], cfg["seconds_per_mb"], cfg["node_contention_factor"])


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def _write_run_reports(out: Path, trace, extra: dict) -> dict:
    metrics = trace_metrics(trace)
    write_trace_csv(trace, out / "trace.csv")
    write_ecdf_csv(metrics.busy_times, out / "ecdf.csv")
    stats = {**extra, "schedule": metrics.as_dict()}
    _write_json(out / "stats.json", stats)
    return stats


# --- commands --------------------------------------------------------------

def cmd_organize(cfg: dict, out: Path) -> dict:
    from trackforge.ingest import organize, parse_registry

    src = Path(cfg["input"])
    files = sorted(p for p in src.rglob("*.csv")) if src.is_dir() else [src]
    registry, rejects = parse_registry(cfg["registry"])
    stats, trace = organize(files, registry, out / "tree", cfg["ceiling_ft"], n_workers(cfg),
                            cfg["distribution"], protocol(cfg), policy(cfg))
    for r in rejects:
        logger.warning("registry %s:%d rejected: %s", r.file, r.line, r.reason)
    return _write_run_reports(out, trace, {"organize": asdict(stats), "registry_rejects": len(rejects)})


def cmd_archive(cfg: dict, out: Path) -> dict:
    from trackforge.ingest import archive_leaves

    report, trace = archive_leaves(cfg["input"], out / "archive", bool(cfg["strict"]), n_workers(cfg),
                                   cfg["distribution"], protocol(cfg), policy(cfg))
    for leaf, err in report.failed.items():
        logger.warning("leaf %s failed: %s", leaf, err)
    return _write_run_reports(out, trace, {"archive": asdict(report)})


def cmd_segment(cfg: dict, out: Path) -> dict:
    from trackforge.ingest import make_tasks
    from trackforge.tracks import SegmentConfig, process_archive_task, read_airspace, read_dem

    root = Path(cfg["input"])
    dem = read_dem(cfg["dem"])
    volumes = read_airspace(cfg["airspace"]) if cfg["airspace"] else []
    seg_cfg = SegmentConfig(cfg["max_gap_s"], cfg["min_points"], cfg["rate_hz"])
    tasks, files = make_tasks(root)
    zips = {t.id: f for t, f in zip(tasks, files) if f.suffix == ".zip"}
    tasks = [t for t in tasks if t.id in zips]

    def run(task):
        rel = zips[task.id].relative_to(root).with_suffix("")
        return process_archive_task(zips[task.id], dem, volumes, out / "segments" / rel, seg_cfg)

    pcfg = protocol(cfg)
    results, trace = run_tasks(tasks, run, n_workers(cfg), cfg["distribution"], pcfg, policy(cfg))
    totals = {"archives": len(tasks), "messages": message_count(len(tasks), pcfg.tasks_per_message)
              if cfg["distribution"] == "self_sched" else None}
    for key in ("aircraft", "aircraft_failed", "segments_kept", "segments_dropped", "rows_out"):
        totals[key] = sum(getattr(s, key) for s in results.values())
    return _write_run_reports(out, trace, {"segment": totals})


def _month(text: str) -> tuple[int, int]:
    try:
        y, m = (int(v) for v in text.split("-"))
    except ValueError as exc:
        raise ConfigError(f"month must look like YYYY-MM, got {text!r}") from exc
    return y, m


def cmd_querygen(cfg: dict, out: Path) -> dict:
    from trackforge.querygen import (
        QueryGenConfig,
        day_list,
        generate_queries,
        read_aerodromes,
        write_box_outlines_csv,
        write_queries_csv,
    )
    from trackforge.tracks import read_airspace, read_dem

    aerodromes = read_aerodromes(cfg["aerodromes"])
    if not aerodromes:
        raise ConfigError(f"{cfg['aerodromes']}: no aerodromes")
    dem = read_dem(cfg["dem"])
    volumes = read_airspace(cfg["airspace"]) if cfg["airspace"] else None
    days = day_list(_month(cfg["first_month"]), _month(cfg["last_month"]), cfg["days_per_month"])
    qcfg = QueryGenConfig(
        radius_m=cfg["radius_m"], n_vertices=cfg["n_vertices"], grid_deg=cfg["grid_deg"],
        max_span_deg=cfg["max_span_deg"], max_dist_m=cfg["max_dist_m"],
        agl_floor_ft=cfg["agl_floor_ft"], agl_ceiling_ft=cfg["agl_ceiling_ft"],
        hard_ceiling_ft=cfg["hard_ceiling_ft"], msl_cap_ft=cfg["msl_cap_ft"],
        group_count=cfg["group_count"],
    )
    res = generate_queries(aerodromes, dem, volumes, days, qcfg)
    write_queries_csv(res.queries, out / "queries.csv")
    write_box_outlines_csv(res.boxes, out / "box_outlines.csv")
    stats = {"querygen": res.counts}
    _write_json(out / "stats.json", stats)
    return stats


def _workload(cfg: dict, seed: int) -> Workload:
    kind = cfg["workload"]
    if kind == "manifest" or cfg["manifest"]:
        _require(cfg, "manifest")
        return Workload(tuple(read_manifest(cfg["manifest"])), "manifest")
    name = kind if kind.startswith("synthetic_") else f"synthetic_{kind}"
    if name not in DEFAULT_PARAMS:
        raise ConfigError(f"unknown workload {kind!r}")
    return synth_workload(name, cfg["n_tasks"], seed=seed)


def _cells(cfg: dict) -> list[tuple[int, int]]:
    if cfg["cells"] is None:
        if cfg["nodes"] is not None:
            return [(n_workers(cfg), cfg["nppn"])]
        return list(TABLE_CELLS)
    try:
        cells = [tuple(int(v) for v in c.split("x")) for c in cfg["cells"].split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --cells value {cfg['cells']!r}") from exc
    if any(len(c) != 2 or min(c) < 1 for c in cells):
        raise ConfigError(f"bad --cells value {cfg['cells']!r}")
    return cells


def _int_list(text: str | None, name: str) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad {name} value {text!r}") from exc


def cmd_bench(cfg: dict, out: Path) -> dict:
    cells = _cells(cfg)
    kinds = [k.strip() for k in cfg["policies"].split(",")]
    bad = set(kinds) - set(ORDERING_KINDS)
    if bad:
        raise ConfigError(f"unknown policies {sorted(bad)}")
    if cfg["seeds"] < 1:
        raise ConfigError("seeds must be >= 1")
    tpms = _int_list(cfg["tpm_sweep"], "tpm_sweep")
    pcfg, cm = protocol(cfg), cost_model(cfg)
    rows = []
    compare = []
    for s in range(cfg["seed"], cfg["seed"] + cfg["seeds"]):
        wl = _workload(cfg, s)
        pols = [OrderingPolicy(k, s) for k in kinds]
        rows += [replace(r, seed=s) for r in benchmark_sweep(wl, cells, pols, pcfg, cm, tpms)]
        if cfg["compare"]:
            for part in [p.strip() for p in cfg["compare"].split(",")]:
                if part not in ("block", "cyclic"):
                    raise ConfigError(f"--compare accepts block and cyclic, got {part!r}")
                for w, nppn in cells:
                    jt = simulate_static(wl, w, part, cm, nppn).job_time_s
                    compare.append({"seed": s, "partition": part, "n_workers": w, "nppn": nppn,
                                    "job_time_s": jt})

    write_sweep_csv(rows, out / "sweep.csv", with_seed=True)
    mean_rows = _mean_over_seeds(rows)
    tables = [render_markdown_table(mean_rows, k, f"Job time (s), {k} ordering") for k in kinds]
    (out / "tables.md").write_text("\n".join(t for t in tables if t))
    write_series_csv(mean_rows, out / "series_cores.csv", "allocated_cores")
    if tpms:
        write_series_csv(mean_rows, out / "series_tpm.csv", "tasks_per_message")
    # worker-time ECDF of the first cell under the first policy, for the first seed
    wl = _workload(cfg, cfg["seed"])
    w0, nppn0 = cells[0]
    trace = simulate_self_sched(wl, w0, OrderingPolicy(kinds[0], cfg["seed"]), pcfg, cm, nppn0)
    write_ecdf_csv(trace.busy_times(), out / "ecdf.csv")
    stats = {"bench": {"rows": len(rows), "cells": cells, "policies": kinds, "seeds": cfg["seeds"]},
             "compare": compare}
    if compare:
        with open(out / "compare.csv", "w") as fh:
            fh.write("seed,partition,n_workers,nppn,job_time_s\n")
            for c in compare:
                fh.write(f"{c['seed']},{c['partition']},{c['n_workers']},{c['nppn']},{c['job_time_s']:.3f}\n")
    _write_json(out / "stats.json", stats)
    return stats


def _mean_over_seeds(rows):
    groups = {}
    for r in rows:
        groups.setdefault((r.policy, r.n_workers, r.nppn, r.tasks_per_message), []).append(r.job_time_s)
    return [replace(rows[0], policy=p, n_workers=w, nppn=n, tasks_per_message=c,
                    job_time_s=sum(v) / len(v), seed=None)
            for (p, w, n, c), v in groups.items()]


def cmd_simulate(cfg: dict, out: Path) -> dict:
    wl = _workload(cfg, cfg["seed"])
    w, cm = n_workers(cfg), cost_model(cfg)
    if cfg["distribution"] == "self_sched":
        trace = simulate_self_sched(wl, w, policy(cfg), protocol(cfg), cm, cfg["nppn"])
    else:
        trace = simulate_static(wl, w, cfg["distribution"], cm, cfg["nppn"])
    return _write_run_reports(out, trace, {"simulate": {"tasks": len(wl), "n_workers": w}})


HANDLERS = {
    "organize": (cmd_organize, ("input", "registry")),
    "archive": (cmd_archive, ("input",)),
    "segment": (cmd_segment, ("input", "dem")),
    "querygen": (cmd_querygen, ("aerodromes", "dem")),
    "bench": (cmd_bench, ()),
    "simulate": (cmd_simulate, ()),
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        handler, required = HANDLERS[args.command]
        _require(cfg, *required)
        for key in ("airspace", "manifest"):
            if cfg.get(key):
                _require(cfg, key)
        protocol(cfg)
        policy(cfg)
        n_workers(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"trackforge: error: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "resolved_config.json", cfg)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            stats = handler(cfg, out)
    except ConfigError as exc:
        print(f"trackforge: error: {exc}", file=sys.stderr)
        return 2
    except (TrackforgeError, OSError, ValueError) as exc:
        print(f"trackforge: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(stats, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
