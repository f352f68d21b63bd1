"""Synthetic workloads shaped like the two aircraft datasets."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Sequence

import numpy as np

from trackforge.errors import InvalidParams
from trackforge.sched.tasks import Task

PROVENANCES = ("synthetic_gaussian", "synthetic_heavy_tail", "synthetic_clustered", "manifest")

# hour-files of the Monday dataset: 2425 files, ~714 GB in total
DATASET1_N = 2425
# desk-scale stand-in for the 136,884-file aerodrome dataset
DATASET2_N = 5000

DEFAULT_PARAMS = {
    "synthetic_gaussian": {"mean_mb": 294.0, "sd_mb": 150.0},
    "synthetic_heavy_tail": {"alpha": 1.5, "min_mb": 1.0, "max_mb": 100.0},
    "synthetic_clustered": {"alpha": 1.5, "min_mb": 1.0, "max_mb": 100.0, "run_fraction": 0.1},
}
DEFAULT_N = {
    "synthetic_gaussian": DATASET1_N,
    "synthetic_heavy_tail": DATASET2_N,
    "synthetic_clustered": DATASET2_N,
}

EPOCH = datetime(2018, 2, 5, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Workload:
    tasks: tuple[Task, ...]
    provenance: str = "manifest"

    def __post_init__(self):
        if not self.tasks:
            raise InvalidParams("a workload needs at least one task")
        if self.provenance not in PROVENANCES:
            raise InvalidParams(f"unknown provenance {self.provenance!r}")

    def __len__(self):
        return len(self.tasks)

    def sizes_mb(self) -> np.ndarray:
        return np.array([t.size_mb for t in self.tasks])


def workload_from_costs(costs: Sequence[float]) -> Workload:
    """Tasks whose size in MB equals the given cost (pair with a 1 s/MB, zero-overhead model)."""
    return Workload(
        tuple(
            Task(i, int(round(c * 1e6)), EPOCH + timedelta(hours=i))
            for i, c in enumerate(costs)
        ),
        "manifest",
    )


def _truncated_normal(rng, n, mean, sd):
    out = np.empty(0)
    while out.size < n:
        draw = rng.normal(mean, sd, size=2 * (n - out.size) + 16)
        out = np.concatenate([out, draw[draw > 0]])
    return out[:n]


def _bounded_pareto(rng, n, alpha, lo, hi):
    u = rng.random(n)
    return lo * (1.0 - u * (1.0 - (lo / hi) ** alpha)) ** (-1.0 / alpha)


def synth_workload(kind: str, n: int | None = None, params: dict | None = None,
                   seed: int = 0) -> Workload:
    """Generate a deterministic synthetic workload.

    ``synthetic_gaussian``
        Sizes from a normal distribution truncated at zero (hourly files of
        the first dataset). Time keys are consecutive hours, so chronological
        order is independent of size.
    ``synthetic_heavy_tail``
        Sizes from a bounded power law (the many-small-files second dataset).
    ``synthetic_clustered``
        Heavy-tail sizes where the largest ``run_fraction`` of tasks sit in one
        consecutive, size-sorted run at the start, mimicking filename-sorted
        tasks of heavily observed aircraft. The rest keep random order.
    """
    if kind not in DEFAULT_PARAMS:
        raise InvalidParams(f"unknown workload kind {kind!r}")
    n = DEFAULT_N[kind] if n is None else n
    if n < 1:
        raise InvalidParams("n must be >= 1")
    p = {**DEFAULT_PARAMS[kind], **(params or {})}
    rng = np.random.default_rng(seed)

    if kind == "synthetic_gaussian":
        if p["mean_mb"] <= 0 or p["sd_mb"] <= 0:
            raise InvalidParams("mean_mb and sd_mb must be positive")
        sizes = _truncated_normal(rng, n, p["mean_mb"], p["sd_mb"])
    else:
        if p["alpha"] <= 0 or p["min_mb"] <= 0 or p["max_mb"] <= p["min_mb"]:
            raise InvalidParams("need alpha > 0 and 0 < min_mb < max_mb")
        sizes = _bounded_pareto(rng, n, p["alpha"], p["min_mb"], p["max_mb"])
        if kind == "synthetic_clustered":
            frac = p["run_fraction"]
            if not 0 < frac <= 1:
                raise InvalidParams("run_fraction must be in (0, 1]")
            n_run = max(1, int(round(frac * n)))
            by_size = np.argsort(-sizes, kind="stable")
            rest = by_size[n_run:].copy()
            rng.shuffle(rest)
            sizes = np.concatenate([sizes[by_size[:n_run]], sizes[rest]])

    tasks = tuple(
        Task(i, int(round(s * 1e6)), EPOCH + timedelta(hours=i)) for i, s in enumerate(sizes)
    )
    return Workload(tasks, kind)
