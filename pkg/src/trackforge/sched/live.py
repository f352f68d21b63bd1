"""In-process execution of task lists with one manager and N worker threads.

Each worker has its own task channel and completion channel; workers share no
mutable state with the manager. The manager reuses the protocol state machine
verbatim and steps on a fixed grid of poll ticks measured from the job start.
"""

from __future__ import annotations

import logging
import math
import queue
import threading
import time
from typing import Any, Callable, Sequence

from trackforge.errors import ConfigError, Timeout, WorkerPanic
from trackforge.sched.config import ProtocolConfig
from trackforge.sched.protocol import Completion, ManagerState, Send, Shutdown
from trackforge.sched.tasks import (
    OrderingPolicy,
    Task,
    TaskMessage,
    block_partition,
    chunk_messages,
    cyclic_partition,
    order_tasks,
)
from trackforge.sched.trace import ScheduleTrace, TaskInterval

logger = logging.getLogger(__name__)

Executor = Callable[[Task], Any]

DISTRIBUTIONS = ("block", "cyclic", "self_sched")

_SHUTDOWN = object()


def _run_message(msg, by_id, executor, clock, results):
    intervals = []
    for tid in msg.task_ids:
        start = clock()
        try:
            out = executor(by_id[tid])
        except Exception as exc:  # reported to the manager as a panic
            return intervals, (tid, exc)
        end = clock()
        if results is not None:
            results[tid] = out
        intervals.append(TaskInterval(tid, msg.message_id, start, end))
    return intervals, None


def _worker_loop(wid, inbox, outbox, by_id, executor, clock, poll, results):
    while True:
        try:
            item = inbox.get(timeout=poll)
        except queue.Empty:
            continue
        if item is _SHUTDOWN:
            return
        intervals, failure = _run_message(item, by_id, executor, clock, results)
        outbox.put((item.message_id, intervals, failure))


def run_live(
    tasks: Sequence[Task],
    n_workers: int,
    pcfg: ProtocolConfig,
    executor: Executor,
    policy: OrderingPolicy | None = None,
    timeout_s: float | None = None,
    results: dict | None = None,
) -> ScheduleTrace:
    """Self-schedule `tasks` over `n_workers` threads and return the trace.

    Tasks are ordered by `policy` (or kept as given), chunked into messages of
    ``pcfg.tasks_per_message`` and handed out by the manager. If `results` is a
    dict, each executor return value is stored under its task id.
    """
    if n_workers < 1:
        raise ConfigError("run_live needs at least one worker")
    if not pcfg.poll_interval_s > 0:
        raise ConfigError("run_live needs a positive poll interval")
    ordered = order_tasks(tasks, policy) if policy else list(tasks)
    by_id = {t.id: t for t in ordered}
    messages = chunk_messages(ordered, pcfg.tasks_per_message)
    poll = pcfg.poll_interval_s

    inboxes = [queue.Queue() for _ in range(n_workers)]
    outboxes = [queue.Queue() for _ in range(n_workers)]
    origin = [0.0]

    def clock():
        return time.perf_counter() - origin[0]

    threads = [
        threading.Thread(
            target=_worker_loop,
            args=(w, inboxes[w], outboxes[w], by_id, executor, clock, poll, results),
            name=f"trackforge-worker-{w}",
            daemon=True,
        )
        for w in range(n_workers)
    ]
    for th in threads:
        th.start()

    state = ManagerState.initial(messages, n_workers)
    timelines: list[list[TaskInterval]] = [[] for _ in range(n_workers)]

    def dispatch(actions):
        for act in actions:
            if isinstance(act, Send):
                inboxes[act.worker_id].put(act.message)
            elif isinstance(act, Shutdown):
                inboxes[act.worker_id].put(_SHUTDOWN)

    def abort():
        for box in inboxes:
            box.put(_SHUTDOWN)
        for th in threads:
            th.join()

    origin[0] = time.perf_counter()
    now = 0.0
    dispatch(state.advance(now, []))
    while not state.finished:
        tick = math.floor(clock() / poll) + 1
        time.sleep(max(0.0, tick * poll - clock()))
        now = clock()
        if timeout_s is not None and now > timeout_s:
            abort()
            raise Timeout(f"job exceeded {timeout_s} s wall-clock budget")
        events = []
        for w, box in enumerate(outboxes):
            while True:
                try:
                    mid, intervals, failure = box.get_nowait()
                except queue.Empty:
                    break
                timelines[w].extend(intervals)
                if failure is not None:
                    abort()
                    tid, exc = failure
                    raise WorkerPanic(tid, w, exc) from exc
                events.append(Completion(w, mid))
        dispatch(state.advance(now, events))
    for th in threads:
        th.join()
    return ScheduleTrace(tuple(tuple(t) for t in timelines), now, "self_sched")


def run_static_live(
    tasks: Sequence[Task],
    n_workers: int,
    partition: str,
    executor: Executor,
    policy: OrderingPolicy | None = None,
    results: dict | None = None,
) -> ScheduleTrace:
    """Batch allocation: every worker receives its whole share up front."""
    if partition not in ("block", "cyclic"):
        raise ConfigError(f"unknown static partition {partition!r}")
    if n_workers < 1:
        raise ConfigError("need at least one worker")
    ordered = order_tasks(tasks, policy) if policy else list(tasks)
    by_id = {t.id: t for t in ordered}
    parts = (block_partition if partition == "block" else cyclic_partition)(len(ordered), n_workers)
    shares = [TaskMessage(w, tuple(ordered[i].id for i in idx)) for w, idx in enumerate(parts)]

    origin = time.perf_counter()

    def clock():
        return time.perf_counter() - origin

    outcome: list = [None] * n_workers

    def work(w):
        outcome[w] = _run_message(shares[w], by_id, executor, clock, results)

    threads = [threading.Thread(target=work, args=(w,), daemon=True) for w in range(n_workers)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    job_time = clock()
    for w, (_, failure) in enumerate(outcome):
        if failure is not None:
            tid, exc = failure
            raise WorkerPanic(tid, w, exc) from exc
    return ScheduleTrace(
        tuple(tuple(ivs) for ivs, _ in outcome), job_time, f"static_{partition}"
    )


def run_tasks(
    tasks: Sequence[Task],
    executor: Executor,
    n_workers: int = 1,
    distribution: str = "self_sched",
    pcfg: ProtocolConfig | None = None,
    policy: OrderingPolicy | None = None,
    timeout_s: float | None = None,
) -> tuple[dict[int, Any], ScheduleTrace]:
    """Run `executor` over `tasks` and return ``(results_by_task_id, trace)``."""
    distribution = distribution.replace("-", "_")
    if distribution not in DISTRIBUTIONS:
        raise ConfigError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    results: dict[int, Any] = {}
    if distribution == "self_sched":
        trace = run_live(tasks, n_workers, pcfg or ProtocolConfig(), executor, policy,
                         timeout_s, results)
    else:
        trace = run_static_live(tasks, n_workers, distribution, executor, policy, results)
    logger.info("ran %d tasks on %d workers (%s) in %.3f s",
                len(tasks), n_workers, distribution, trace.job_time_s)
    return results, trace
