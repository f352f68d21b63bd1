"""Job-shape (nodes x processes-per-node x threads) and protocol configuration."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from trackforge.errors import AllocationExceeded, ConfigError, ZeroWorkers

MAX_RECOMMENDED_NPPN = 32
NPPN_MULTIPLE = 8


class NppnWarning(UserWarning):
    """Processes-per-node outside the recommended range (advisory only)."""


@dataclass(frozen=True)
class TriplesConfig:
    """Triples-mode job shape.

    Exclusive mode reserves whole nodes, so the charged allocation is
    ``nodes * slots_per_node`` regardless of how many processes run. One
    process acts as the manager; the rest are workers.
    """

    nodes: int
    nppn: int
    threads_per_process: int = 1
    slots_per_process: int = 1
    slots_per_node: int = 64
    core_allocation: int = 4096

    @property
    def total_processes(self) -> int:
        return self.nodes * self.nppn

    @property
    def worker_count(self) -> int:
        return self.total_processes - 1

    @property
    def charged_cores(self) -> int:
        return self.nodes * self.slots_per_node


@dataclass(frozen=True)
class ProtocolConfig:
    """Manager/worker polling and batching.

    ``poll_interval_s == 0`` is accepted as the zero-latency limit for
    simulation; the live executor requires a positive interval.
    """

    poll_interval_s: float = 0.3
    tasks_per_message: int = 1

    def __post_init__(self):
        if not self.poll_interval_s >= 0:
            raise ConfigError("poll_interval_s must be >= 0")
        if self.tasks_per_message < 1:
            raise ConfigError("tasks_per_message must be >= 1")


def validate_config(cfg: TriplesConfig) -> TriplesConfig:
    """Check a job shape; return it unchanged if usable.

    Raises AllocationExceeded / ZeroWorkers on hard violations. NPPN guidance
    violations only emit NppnWarning.
    """
    for name in ("nodes", "nppn", "threads_per_process", "slots_per_process",
                 "slots_per_node", "core_allocation"):
        value = getattr(cfg, name)
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    if cfg.charged_cores > cfg.core_allocation:
        raise AllocationExceeded(
            f"{cfg.nodes} nodes x {cfg.slots_per_node} slots = {cfg.charged_cores} "
            f"> allocation of {cfg.core_allocation}"
        )
    if cfg.total_processes < 2:
        raise ZeroWorkers("need at least 2 processes (one manager, one worker)")
    if cfg.nppn > MAX_RECOMMENDED_NPPN or cfg.nppn % NPPN_MULTIPLE:
        warnings.warn(
            f"nppn={cfg.nppn}: recommended <= {MAX_RECOMMENDED_NPPN} and a multiple of {NPPN_MULTIPLE}",
            NppnWarning,
            stacklevel=2,
        )
    if cfg.nppn * cfg.slots_per_process > cfg.slots_per_node:
        warnings.warn(
            f"nppn x slots_per_process = {cfg.nppn * cfg.slots_per_process} exceeds "
            f"{cfg.slots_per_node} slots per node",
            NppnWarning,
            stacklevel=2,
        )
    return cfg
