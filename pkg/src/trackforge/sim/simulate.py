"""Event-driven simulation of static and self-scheduled task distribution.

Timing model for self-scheduling with poll interval ``p``: the manager and the
workers poll on tick grids ``k * p`` that both start at t = 0. A message sent
at tick ``s`` starts on the worker at ``s``; its completion at ``t`` is seen by
the manager at the first tick that is ``>= t`` and strictly after ``s``. With
``p == 0`` all latencies vanish.
"""

from __future__ import annotations

import heapq
import math
from typing import Sequence

from trackforge.sched.config import ProtocolConfig
from trackforge.sched.protocol import Completion, ManagerState, Send
from trackforge.sched.tasks import (
    OrderingPolicy,
    Task,
    block_partition,
    chunk_messages,
    cyclic_partition,
    order_tasks,
)
from trackforge.sched.trace import ScheduleTrace, TaskInterval
from trackforge.sim.cost import BASELINE_NPPN
from trackforge.sim.workload import Workload

_TICK_EPS = 1e-9


def _tasks(workload: Workload | Sequence[Task]) -> list[Task]:
    return list(workload.tasks if isinstance(workload, Workload) else workload)


def simulate_static(workload, n_workers: int, partition: str, cost_model,
                    nppn: int = BASELINE_NPPN) -> ScheduleTrace:
    """Batch allocation in the workload's given order; no manager, no polling."""
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    if partition not in ("block", "cyclic"):
        raise ValueError(f"unknown partition {partition!r}")
    tasks = _tasks(workload)
    split = block_partition if partition == "block" else cyclic_partition
    timelines = []
    for w, idx in enumerate(split(len(tasks), n_workers)):
        t = 0.0
        ivs = []
        for i in idx:
            c = cost_model.cost(tasks[i], nppn)
            ivs.append(TaskInterval(tasks[i].id, w, t, t + c))
            t += c
        timelines.append(tuple(ivs))
    job = max((ivs[-1].end_s for ivs in timelines if ivs), default=0.0)
    return ScheduleTrace(tuple(timelines), job, f"static_{partition}")


def simulate_self_sched(workload, n_workers: int, policy: OrderingPolicy,
                        pcfg: ProtocolConfig, cost_model,
                        nppn: int = BASELINE_NPPN) -> ScheduleTrace:
    """Replay the manager protocol with deterministic task costs."""
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    tasks = _tasks(workload)
    ordered = order_tasks(tasks, policy)
    cost = {t.id: cost_model.cost(t, nppn) for t in ordered}
    messages = chunk_messages(ordered, pcfg.tasks_per_message)
    p = pcfg.poll_interval_s

    state = ManagerState.initial(messages, n_workers)
    timelines: list[list[TaskInterval]] = [[] for _ in range(n_workers)]
    # keyed by integer tick index when p > 0 so equal ticks compare exactly
    heap: list[tuple[float, int, int]] = []

    def launch(actions, key):
        start = key * p if p > 0 else key
        for act in actions:
            if not isinstance(act, Send):
                continue
            t = start
            for tid in act.message.task_ids:
                timelines[act.worker_id].append(TaskInterval(tid, act.message.message_id, t, t + cost[tid]))
                t += cost[tid]
            seen = max(math.ceil(t / p - _TICK_EPS), key + 1) if p > 0 else t
            heapq.heappush(heap, (seen, act.worker_id, act.message.message_id))

    key = 0
    launch(state.advance(0.0, []), key)
    while not state.finished:
        key = heap[0][0]
        events = []
        while heap and heap[0][0] == key:
            _, w, mid = heapq.heappop(heap)
            events.append(Completion(w, mid))
        launch(state.advance(key * p if p > 0 else key, events), key)
    job = key * p if p > 0 else key
    return ScheduleTrace(tuple(tuple(t) for t in timelines), float(job), "self_sched")
