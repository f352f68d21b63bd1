"""Discrete-event simulation of the task-distribution policies."""

from trackforge.sim.bench import TABLE_CELLS, SweepRow, benchmark_sweep, compare_static
from trackforge.sim.cost import CostModel, TableCost
from trackforge.sim.metrics import TraceMetrics, ecdf, top_share, trace_metrics
from trackforge.sim.oracle import oracle_job_time
from trackforge.sim.simulate import simulate_self_sched, simulate_static
from trackforge.sim.workload import Workload, synth_workload, workload_from_costs

__all__ = [
    "TABLE_CELLS", "CostModel", "SweepRow", "TableCost", "TraceMetrics", "Workload",
    "benchmark_sweep", "compare_static", "ecdf", "oracle_job_time", "simulate_self_sched",
    "simulate_static", "synth_workload", "top_share", "trace_metrics", "workload_from_costs",
]
