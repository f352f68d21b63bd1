"""Manager side of the self-scheduling protocol as a deterministic state machine.

The manager owns an ordered list of messages. On the first step it fans out
one message to every worker without pausing. On each later step it marks
the workers that reported completions as idle and hands the next pending
message to each idle worker in ascending worker-id order. Once every message
is completed it emits a shutdown to all workers. Between steps the driver
(simulator or live executor) sleeps for the poll interval.

``manager_step`` is pure. Drivers that step many thousands of times may use
``ManagerState.advance`` directly, which applies the same transition in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from trackforge.errors import DuplicateCompletion, ProtocolError, UnknownWorker
from trackforge.sched.tasks import TaskMessage


@dataclass(frozen=True)
class Send:
    worker_id: int
    message: TaskMessage


@dataclass(frozen=True)
class Shutdown:
    worker_id: int


@dataclass(frozen=True)
class Completion:
    worker_id: int
    message_id: int


@dataclass
class ManagerState:
    messages: tuple[TaskMessage, ...]
    n_workers: int
    next_index: int = 0
    in_flight: dict[int, int] = field(default_factory=dict)  # worker -> message id
    idle: set[int] = field(default_factory=set)
    completed: set[int] = field(default_factory=set)
    started: bool = False
    finished: bool = False
    last_step_s: float | None = None

    @classmethod
    def initial(cls, messages: Sequence[TaskMessage], n_workers: int) -> "ManagerState":
        if n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        ids = [m.message_id for m in messages]
        if len(set(ids)) != len(ids):
            raise ValueError("message ids must be unique")
        return cls(messages=tuple(messages), n_workers=n_workers)

    @property
    def pending(self) -> int:
        return len(self.messages) - self.next_index

    def copy(self) -> "ManagerState":
        return ManagerState(
            messages=self.messages,
            n_workers=self.n_workers,
            next_index=self.next_index,
            in_flight=dict(self.in_flight),
            idle=set(self.idle),
            completed=set(self.completed),
            started=self.started,
            finished=self.finished,
            last_step_s=self.last_step_s,
        )

    def _check(self, events: Sequence[Completion]) -> None:
        seen = set()
        for ev in events:
            if not 0 <= ev.worker_id < self.n_workers:
                raise UnknownWorker(f"worker {ev.worker_id} is not part of this run")
            if ev.message_id in self.completed or ev.message_id in seen:
                raise DuplicateCompletion(f"message {ev.message_id} completed twice")
            if self.in_flight.get(ev.worker_id) != ev.message_id:
                raise ProtocolError(
                    f"worker {ev.worker_id} reported message {ev.message_id} it does not hold"
                )
            seen.add(ev.message_id)

    def advance(self, now: float, events: Iterable[Completion] = ()) -> list[Send | Shutdown]:
        """Apply one manager step in place and return the actions it emits."""
        events = list(events)
        if self.finished:
            if events:
                raise ProtocolError("completion received after shutdown")
            return []
        self._check(events)
        self.last_step_s = now
        actions: list[Send | Shutdown] = []

        if not self.started:
            self.started = True
            self.idle = set(range(self.n_workers))

        for ev in events:
            del self.in_flight[ev.worker_id]
            self.completed.add(ev.message_id)
            self.idle.add(ev.worker_id)

        if self.next_index < len(self.messages) and self.idle:
            for w in sorted(self.idle):
                if self.next_index >= len(self.messages):
                    break
                msg = self.messages[self.next_index]
                self.next_index += 1
                self.in_flight[w] = msg.message_id
                self.idle.discard(w)
                actions.append(Send(w, msg))

        if len(self.completed) == len(self.messages):
            self.finished = True
            actions.extend(Shutdown(w) for w in range(self.n_workers))
        return actions


def manager_step(
    state: ManagerState, now: float, events: Iterable[Completion] = ()
) -> tuple[ManagerState, list[Send | Shutdown]]:
    """Pure manager transition: returns a new state and the emitted actions."""
    new = state.copy()
    actions = new.advance(now, events)
    return new, actions
