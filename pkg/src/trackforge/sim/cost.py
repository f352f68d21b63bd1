"""Task cost models used by the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from trackforge.errors import InvalidParams
from trackforge.sched.tasks import Task

BASELINE_NPPN = 8


@dataclass(frozen=True)
class CostModel:
    """Affine size-to-seconds model with a processes-per-node contention multiplier.

    ``cost = (fixed_overhead_s + seconds_per_mb * size_mb) * (1 + k * (nppn - 8) / 8)``
    where ``k`` is ``node_contention_factor``.
    """

    fixed_overhead_s: float = 5.0
    seconds_per_mb: float = 2.0
    node_contention_factor: float = 0.25

    def __post_init__(self):
        if self.fixed_overhead_s < 0:
            raise InvalidParams("fixed_overhead_s must be >= 0")
        if not self.seconds_per_mb > 0:
            raise InvalidParams("seconds_per_mb must be > 0")
        if self.node_contention_factor < 0:
            raise InvalidParams("node_contention_factor must be >= 0")

    def multiplier(self, nppn: int) -> float:
        m = 1.0 + self.node_contention_factor * (nppn - BASELINE_NPPN) / BASELINE_NPPN
        if not m > 0:
            raise InvalidParams(f"contention multiplier {m} is not positive at nppn={nppn}")
        return m

    def cost(self, task: Task, nppn: int = BASELINE_NPPN) -> float:
        return (self.fixed_overhead_s + self.seconds_per_mb * task.size_mb) * self.multiplier(nppn)


@dataclass(frozen=True)
class TableCost:
    """Explicit per-task costs in seconds, independent of nppn."""

    costs: Mapping[int, float]

    def cost(self, task: Task, nppn: int = BASELINE_NPPN) -> float:
        return float(self.costs[task.id])
