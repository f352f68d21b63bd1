"""Task model, ordering policies, static partitioners and message chunking."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from trackforge.errors import MissingTimeKey, SchemaMismatch

MANIFEST_HEADER = ["id", "size_bytes", "time_key", "group_key"]

ORDERING_KINDS = ("chronological", "largest_first", "random")


@dataclass(frozen=True)
class Task:
    id: int
    size_bytes: int
    time_key: datetime | None = None
    group_key: str | None = None

    def __post_init__(self):
        if self.size_bytes < 0:
            raise ValueError(f"task {self.id}: size_bytes must be >= 0")

    @property
    def size_mb(self) -> float:
        return self.size_bytes / 1e6


@dataclass(frozen=True)
class OrderingPolicy:
    kind: str = "largest_first"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ORDERING_KINDS:
            raise ValueError(f"unknown ordering {self.kind!r}; expected one of {ORDERING_KINDS}")


@dataclass(frozen=True)
class TaskMessage:
    message_id: int
    task_ids: tuple[int, ...]


def order_tasks(tasks: Sequence[Task], policy: OrderingPolicy) -> list[Task]:
    """Return `tasks` permuted according to `policy`.

    Ties are always broken by ascending task id, so the result depends only on
    the multiset of tasks and never on the input order.
    """
    by_id = sorted(tasks, key=lambda t: t.id)
    if policy.kind == "chronological":
        missing = [t.id for t in by_id if t.time_key is None]
        if missing:
            raise MissingTimeKey(f"{len(missing)} task(s) lack time_key, e.g. id {missing[0]}")
        return sorted(by_id, key=lambda t: t.time_key)
    if policy.kind == "largest_first":
        return sorted(by_id, key=lambda t: -t.size_bytes)
    rng = random.Random(policy.seed)
    rng.shuffle(by_id)
    return by_id


def block_partition(n_tasks: int, n_workers: int) -> list[range]:
    """Contiguous near-equal ranges; earlier workers take the extra tasks."""
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    base, extra = divmod(n_tasks, n_workers)
    ranges = []
    start = 0
    for w in range(n_workers):
        size = base + (1 if w < extra else 0)
        ranges.append(range(start, start + size))
        start += size
    return ranges


def cyclic_partition(n_tasks: int, n_workers: int) -> list[list[int]]:
    """Round-robin assignment: worker w gets w, w + n_workers, ..."""
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    return [list(range(w, n_tasks, n_workers)) for w in range(n_workers)]


def chunk_messages(tasks: Sequence[Task | int], tasks_per_message: int) -> list[TaskMessage]:
    """Split an ordered task list into consecutive messages of at most `tasks_per_message`."""
    if tasks_per_message < 1:
        raise ValueError("tasks_per_message must be >= 1")
    ids = [t.id if isinstance(t, Task) else int(t) for t in tasks]
    return [
        TaskMessage(k, tuple(ids[start : start + tasks_per_message]))
        for k, start in enumerate(range(0, len(ids), tasks_per_message))
    ]


def message_count(n_tasks: int, tasks_per_message: int) -> int:
    if tasks_per_message < 1:
        raise ValueError("tasks_per_message must be >= 1")
    return math.ceil(n_tasks / tasks_per_message)


def read_manifest(path: str | Path) -> list[Task]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_HEADER:
            raise SchemaMismatch(f"{path}: expected header {MANIFEST_HEADER}, got {reader.fieldnames}")
        tasks = []
        for row in reader:
            tasks.append(
                Task(
                    id=int(row["id"]),
                    size_bytes=int(row["size_bytes"]),
                    time_key=datetime.fromisoformat(row["time_key"]) if row["time_key"] else None,
                    group_key=row["group_key"] or None,
                )
            )
    return tasks


def write_manifest(tasks: Iterable[Task], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for t in tasks:
            writer.writerow(
                [t.id, t.size_bytes, t.time_key.isoformat() if t.time_key else "", t.group_key or ""]
            )
