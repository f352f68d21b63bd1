"""Task distribution: ordering, static partitions, self-scheduling protocol."""

from trackforge.sched.config import NppnWarning, ProtocolConfig, TriplesConfig, validate_config
from trackforge.sched.live import run_live, run_static_live, run_tasks
from trackforge.sched.protocol import Completion, ManagerState, Send, Shutdown, manager_step
from trackforge.sched.tasks import (
    OrderingPolicy,
    Task,
    TaskMessage,
    block_partition,
    chunk_messages,
    cyclic_partition,
    message_count,
    order_tasks,
    read_manifest,
    write_manifest,
)
from trackforge.sched.trace import ScheduleTrace, TaskInterval, read_trace_csv, write_trace_csv

__all__ = [
    "Completion", "ManagerState", "NppnWarning", "OrderingPolicy", "ProtocolConfig",
    "ScheduleTrace", "Send", "Shutdown", "Task", "TaskInterval", "TaskMessage",
    "TriplesConfig", "block_partition", "chunk_messages", "cyclic_partition",
    "manager_step", "message_count", "order_tasks", "read_manifest", "read_trace_csv",
    "run_live", "run_static_live", "run_tasks", "validate_config", "write_manifest",
    "write_trace_csv",
]
