"""Time-stepped brute-force execution of the self-scheduling rules.

Used only to cross-check the event-driven simulator on small instances. It
shares nothing with the protocol state machine: workers count down remaining
work in steps of ``dt`` and the manager checks for finished workers every
``poll / dt`` steps.
"""

from __future__ import annotations

from trackforge.sched.config import ProtocolConfig
from trackforge.sched.tasks import OrderingPolicy, chunk_messages, order_tasks
from trackforge.sim.cost import BASELINE_NPPN

_DONE_EPS = 1e-9


def oracle_job_time(workload, n_workers: int, policy: OrderingPolicy, pcfg: ProtocolConfig,
                    cost_model, dt: float = 0.05, nppn: int = BASELINE_NPPN,
                    max_steps: int = 10_000_000) -> float:
    tasks = list(getattr(workload, "tasks", workload))
    ordered = order_tasks(tasks, policy)
    cost = {t.id: cost_model.cost(t, nppn) for t in ordered}
    msg_costs = [sum(cost[i] for i in m.task_ids) for m in chunk_messages(ordered, pcfg.tasks_per_message)]
    p = pcfg.poll_interval_s
    if p > 0:
        per_poll = round(p / dt)
        if per_poll < 1 or abs(per_poll * dt - p) > 1e-9 * max(1.0, p):
            raise ValueError("poll interval must be a whole multiple of dt")
    else:
        per_poll = 1

    remaining: list[float | None] = [None] * n_workers  # None = idle, waiting for work
    reported = [False] * n_workers
    nxt = 0
    done = 0
    for w in range(n_workers):
        if nxt < len(msg_costs):
            remaining[w] = msg_costs[nxt]
            nxt += 1
    if not msg_costs:
        return 0.0

    step = 0
    while step < max_steps:
        step += 1
        for w in range(n_workers):
            if remaining[w] is not None and not reported[w]:
                remaining[w] -= dt
                if remaining[w] <= _DONE_EPS:
                    reported[w] = True
        if step % per_poll:
            continue
        for w in range(n_workers):
            if reported[w]:
                done += 1
                reported[w] = False
                remaining[w] = None
        if done == len(msg_costs):
            return step * dt if p == 0 else (step // per_poll) * p
        for w in range(n_workers):
            if remaining[w] is None and nxt < len(msg_costs):
                remaining[w] = msg_costs[nxt]
                nxt += 1
    raise RuntimeError("oracle did not terminate within max_steps")
