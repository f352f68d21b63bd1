"""Benchmark sweeps over job shapes, ordering policies and message sizes."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from trackforge.sched.config import ProtocolConfig
from trackforge.sched.tasks import OrderingPolicy
from trackforge.sim.simulate import simulate_self_sched, simulate_static

# (workers, nppn) cells of the organize benchmark; workers = processes - 1
TABLE_CELLS: tuple[tuple[int, int], ...] = (
    (2047, 32), (1023, 32), (511, 32), (255, 32),
    (1023, 16), (511, 16), (255, 16),
    (511, 8), (255, 8),
)

SWEEP_HEADER = ["policy", "n_workers", "nppn", "tasks_per_message", "job_time_s"]


@dataclass(frozen=True)
class SweepRow:
    policy: str
    n_workers: int
    nppn: int
    tasks_per_message: int
    job_time_s: float
    seed: int | None = None


def cell_seed(seed: int, cell_index: int) -> int:
    """Reproducible per-cell seed for the random ordering policy."""
    return int(np.random.SeedSequence([seed, cell_index]).generate_state(1)[0])


def benchmark_sweep(workload, configs: Sequence[tuple[int, int]],
                    policies: Iterable[OrderingPolicy], pcfg: ProtocolConfig,
                    cost_model, tasks_per_message: Sequence[int] | None = None) -> list[SweepRow]:
    if not configs:
        raise ValueError("configs must be non-empty")
    tpms = list(tasks_per_message) if tasks_per_message else [pcfg.tasks_per_message]
    rows = []
    idx = 0
    for policy in policies:
        for n_workers, nppn in configs:
            for c in tpms:
                pol = policy
                if policy.kind == "random":
                    pol = replace(policy, seed=cell_seed(policy.seed, idx))
                trace = simulate_self_sched(
                    workload, n_workers, pol, replace(pcfg, tasks_per_message=c), cost_model, nppn
                )
                rows.append(SweepRow(policy.kind, n_workers, nppn, c, trace.job_time_s))
                idx += 1
    return rows


def compare_static(workload, n_workers: int, cost_model, nppn: int = 8) -> dict[str, float]:
    return {
        part: simulate_static(workload, n_workers, part, cost_model, nppn).job_time_s
        for part in ("block", "cyclic")
    }


def write_sweep_csv(rows: Iterable[SweepRow], path: str | Path, with_seed: bool = False) -> None:
    header = SWEEP_HEADER + (["seed"] if with_seed else [])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            line = [r.policy, r.n_workers, r.nppn, r.tasks_per_message, f"{r.job_time_s:.3f}"]
            if with_seed:
                line.append("" if r.seed is None else r.seed)
            writer.writerow(line)


def render_markdown_table(rows: Iterable[SweepRow], policy: str, title: str | None = None) -> str:
    """Job-time grid with one row per NPPN and one column per allocated process count."""
    cells = {(r.nppn, r.n_workers + 1): r.job_time_s for r in rows if r.policy == policy}
    if not cells:
        return ""
    nppns = sorted({k[0] for k in cells}, reverse=True)
    cores = sorted({k[1] for k in cells}, reverse=True)
    lines = []
    if title:
        lines += [f"**{title}**", ""]
    lines.append("| NPPN | " + " | ".join(str(c) for c in cores) + " |")
    lines.append("|---|" + "---|" * len(cores))
    for nppn in nppns:
        vals = [f"{cells[(nppn, c)]:.0f}" if (nppn, c) in cells else "-" for c in cores]
        lines.append(f"| {nppn} | " + " | ".join(vals) + " |")
    return "\n".join(lines) + "\n"


def write_series_csv(rows: Iterable[SweepRow], path: str | Path, key: str) -> None:
    """Plot-ready series; `key` is ``allocated_cores`` or ``tasks_per_message``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key, "nppn", "policy", "job_time_s"])
        for r in rows:
            x = r.n_workers + 1 if key == "allocated_cores" else r.tasks_per_message
            writer.writerow([x, r.nppn, r.policy, f"{r.job_time_s:.3f}"])
