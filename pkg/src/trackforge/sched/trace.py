"""Per-worker execution timelines produced by the simulator or the live executor."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

TRACE_HEADER = ["worker_id", "message_id", "task_id", "start_s", "end_s"]
MODES = ("static_block", "static_cyclic", "self_sched")


@dataclass(frozen=True)
class TaskInterval:
    task_id: int
    message_id: int
    start_s: float
    end_s: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class ScheduleTrace:
    per_worker: tuple[tuple[TaskInterval, ...], ...]
    job_time_s: float
    mode: str

    @property
    def n_workers(self) -> int:
        return len(self.per_worker)

    def busy_times(self) -> list[float]:
        return [sum(iv.duration_s for iv in ivs) for ivs in self.per_worker]

    def tasks_of(self, worker_id: int) -> list[int]:
        return [iv.task_id for iv in self.per_worker[worker_id]]

    def worker_of(self) -> dict[int, int]:
        return {iv.task_id: w for w, ivs in enumerate(self.per_worker) for iv in ivs}

    def rows(self):
        for w, ivs in enumerate(self.per_worker):
            for iv in ivs:
                yield w, iv.message_id, iv.task_id, iv.start_s, iv.end_s


def write_trace_csv(trace: ScheduleTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for w, m, t, s, e in trace.rows():
            writer.writerow([w, m, t, f"{s:.6f}", f"{e:.6f}"])
        fh.write(f"job_time_s={trace.job_time_s:.6f}\n")


def read_trace_csv(path: str | Path, mode: str = "self_sched") -> ScheduleTrace:
    per_worker: dict[int, list[TaskInterval]] = {}
    job_time = None
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split(",") != TRACE_HEADER:
        raise ValueError(f"{path}: not a trace file")
    for line in lines[1:]:
        if line.startswith("job_time_s="):
            job_time = float(line.split("=", 1)[1])
            continue
        w, m, t, s, e = line.split(",")
        per_worker.setdefault(int(w), []).append(TaskInterval(int(t), int(m), float(s), float(e)))
    if job_time is None:
        raise ValueError(f"{path}: missing job_time_s summary line")
    n = max(per_worker, default=-1) + 1
    return ScheduleTrace(tuple(tuple(per_worker.get(w, ())) for w in range(n)), job_time, mode)
