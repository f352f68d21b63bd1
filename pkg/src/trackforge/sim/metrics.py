"""Load-balance metrics over worker busy times."""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from trackforge.sched.trace import ScheduleTrace


def top_share(busy_times: Sequence, p: float):
    """Fraction of total busy time held by the busiest ``ceil(p * n)`` workers.

    Pure-Python arithmetic, so exact inputs (``fractions.Fraction``) give exact
    results.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must be within [0, 1]")
    n = len(busy_times)
    if n == 0:
        raise ValueError("no workers")
    k = min(n, math.ceil(p * n - 1e-9))
    ranked = sorted(busy_times, reverse=True)
    total = sum(ranked)
    if total == 0:
        return k / n
    return sum(ranked[:k]) / total


def ecdf(values: Sequence[float]) -> list[tuple[float, float]]:
    """Right-continuous step points ``(x, fraction <= x)``, one per distinct value."""
    xs = sorted(values)
    n = len(xs)
    points = []
    for i, x in enumerate(xs, start=1):
        if points and points[-1][0] == x:
            points[-1] = (x, i / n)
        else:
            points.append((x, i / n))
    return points


@dataclass(frozen=True)
class TraceMetrics:
    job_time_s: float
    median_worker_busy_s: float
    span_s: float
    busy_times: tuple[float, ...]

    def top_share(self, p: float) -> float:
        return top_share(self.busy_times, p)

    def ecdf(self) -> list[tuple[float, float]]:
        return ecdf(self.busy_times)

    def as_dict(self, shares=(0.02, 0.1, 0.5)) -> dict:
        return {
            "job_time_s": self.job_time_s,
            "median_worker_busy_s": self.median_worker_busy_s,
            "span_s": self.span_s,
            "n_workers": len(self.busy_times),
            "total_busy_s": sum(self.busy_times),
            "top_share": {f"{p:g}": self.top_share(p) for p in shares},
        }


def metrics_from_busy(busy_times: Sequence[float], job_time_s: float | None = None) -> TraceMetrics:
    busy = tuple(busy_times)
    if not busy:
        raise ValueError("no workers")
    return TraceMetrics(
        job_time_s=max(busy) if job_time_s is None else job_time_s,
        median_worker_busy_s=statistics.median(busy),
        span_s=max(busy) - min(busy),
        busy_times=busy,
    )


def trace_metrics(trace: ScheduleTrace) -> TraceMetrics:
    return metrics_from_busy(trace.busy_times(), trace.job_time_s)


def write_ecdf_csv(busy_times: Sequence[float], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["busy_time_s", "cum_fraction"])
        for x, f in ecdf(busy_times):
            writer.writerow([f"{x:.6f}", f"{f:.6f}"])
