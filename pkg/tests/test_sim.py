import heapq
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trackforge.errors import InvalidParams
from trackforge.sched import OrderingPolicy, ProtocolConfig, Task
from trackforge.sim import (
    TABLE_CELLS,
    CostModel,
    TableCost,
    benchmark_sweep,
    ecdf,
    oracle_job_time,
    simulate_self_sched,
    simulate_static,
    synth_workload,
    top_share,
    trace_metrics,
    workload_from_costs,
)
from trackforge.sim.bench import render_markdown_table, write_series_csv, write_sweep_csv
from trackforge.sim.metrics import metrics_from_busy, write_ecdf_csv

UNIT = CostModel(fixed_overhead_s=0.0, seconds_per_mb=1.0, node_contention_factor=0.0)
ZERO_POLL = ProtocolConfig(poll_interval_s=0.0)
LPT = OrderingPolicy("largest_first")
CHRONO = OrderingPolicy("chronological")


def greedy_makespan(costs, m):
    """List scheduling: each task in turn goes to the earliest-free worker (lowest id on ties)."""
    free = [(0.0, w) for w in range(m)]
    end = 0.0
    for c in costs:
        t, w = heapq.heappop(free)
        heapq.heappush(free, (t + c, w))
        end = max(end, t + c)
    return end


# --- cost model ------------------------------------------------------------

def test_cost_model_contention():
    cm = CostModel(fixed_overhead_s=1.0, seconds_per_mb=2.0, node_contention_factor=0.25)
    task = Task(0, 3_000_000)
    assert cm.cost(task, 8) == pytest.approx(7.0)
    assert cm.cost(task, 16) == pytest.approx(7.0 * 1.25)
    assert cm.cost(task, 32) == pytest.approx(7.0 * 1.75)
    assert cm.cost(Task(1, 0), 8) > 0


def test_cost_model_validation():
    with pytest.raises(InvalidParams):
        CostModel(seconds_per_mb=0)
    with pytest.raises(InvalidParams):
        CostModel(fixed_overhead_s=-1)


# --- static distribution ---------------------------------------------------

def test_static_block_sum_of_halves():
    trace = simulate_static(workload_from_costs([1, 1, 1, 97]), 2, "block", UNIT)
    assert trace.busy_times() == pytest.approx([2, 98])
    assert trace.job_time_s == pytest.approx(98)


def test_static_block_vs_cyclic_hand_enumerated():
    wl = workload_from_costs([50, 50, 1, 1])
    # block: {50, 50} | {1, 1};  cyclic: {50, 1} | {50, 1}
    assert simulate_static(wl, 2, "block", UNIT).job_time_s == pytest.approx(100)
    assert simulate_static(wl, 2, "cyclic", UNIT).job_time_s == pytest.approx(51)


@pytest.mark.parametrize("part", ["block", "cyclic"])
def test_static_single_worker_is_total(part):
    costs = [3, 1, 4, 1, 5]
    assert simulate_static(workload_from_costs(costs), 1, part, UNIT).job_time_s == pytest.approx(14)


# --- self-scheduling -------------------------------------------------------

def test_self_sched_largest_first_zero_poll():
    trace = simulate_self_sched(workload_from_costs([3, 1, 1, 1]), 2, LPT, ZERO_POLL, UNIT)
    assert trace.job_time_s == pytest.approx(3)
    assert trace.tasks_of(0) == [0]
    assert trace.tasks_of(1) == [1, 2, 3]


def test_self_sched_chronological_zero_poll():
    # order [1, 1, 1, 3]: both workers free at t=1, the cost-3 task runs 1..4
    trace = simulate_self_sched(workload_from_costs([1, 1, 1, 3]), 2, CHRONO, ZERO_POLL, UNIT)
    assert trace.job_time_s == pytest.approx(4)


def test_self_sched_single_worker_serializes_with_poll_remainders():
    costs = [0.25, 0.5, 0.1]
    pcfg = ProtocolConfig(poll_interval_s=0.3)
    trace = simulate_self_sched(workload_from_costs(costs), 1, CHRONO, pcfg, UNIT)
    # 0 -> .25 seen at .3; .3 -> .8 seen at .9; .9 -> 1.0 seen at 1.2
    assert trace.job_time_s == pytest.approx(1.2)
    assert sum(trace.busy_times()) == pytest.approx(sum(costs))
    assert trace.job_time_s >= sum(costs)


@settings(max_examples=80)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=40), st.integers(1, 6))
def test_zero_poll_matches_greedy_list_scheduling(costs, m):
    wl = workload_from_costs(costs)
    table = TableCost(dict(enumerate(costs)))
    trace = simulate_self_sched(wl, m, CHRONO, ZERO_POLL, table)
    assert trace.job_time_s == pytest.approx(greedy_makespan(costs, m), abs=1e-9)


@settings(max_examples=60)
@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=30), st.integers(1, 5),
       st.sampled_from([0.0, 0.1, 0.3]), st.integers(1, 4),
       st.sampled_from(["random", "largest_first", "chronological"]))
def test_trace_invariants(costs, m, poll, c, kind):
    table = TableCost(dict(enumerate(costs)))
    wl = workload_from_costs(costs)
    pcfg = ProtocolConfig(poll_interval_s=poll, tasks_per_message=c)
    for trace in (simulate_self_sched(wl, m, OrderingPolicy(kind, 3), pcfg, table),
                  simulate_static(wl, m, "block", table),
                  simulate_static(wl, m, "cyclic", table)):
        assert sorted(trace.worker_of()) == list(range(len(costs)))
        assert sum(trace.busy_times()) == pytest.approx(sum(costs))  # work conservation
        ends = []
        for ivs in trace.per_worker:
            for a, b in zip(ivs, ivs[1:]):
                assert a.end_s <= b.start_s + 1e-12
            ends += [iv.end_s for iv in ivs]
        assert trace.job_time_s >= max(ends) - 1e-9
        if trace.mode == "self_sched":
            assert trace.job_time_s <= max(ends) + poll + 1e-9
        else:
            assert trace.job_time_s == pytest.approx(max(ends))


# --- oracle ----------------------------------------------------------------

def random_instance(rng):
    n = rng.randint(1, 10)
    costs = [round(rng.uniform(0.0, 2.0), 3) for _ in range(n)]
    return costs, rng.randint(1, 3), rng.choice(["random", "largest_first", "chronological"]), rng.randint(1, 3)


def test_oracle_agrees_with_event_simulator():
    rng = random.Random(2024)
    worst = 0.0
    for _ in range(100):
        costs, m, kind, c = random_instance(rng)
        pcfg = ProtocolConfig(poll_interval_s=0.3, tasks_per_message=c)
        policy = OrderingPolicy(kind, rng.randint(0, 1000))
        table = TableCost(dict(enumerate(costs)))
        sim = simulate_self_sched(workload_from_costs(costs), m, policy, pcfg, table).job_time_s
        orc = oracle_job_time(workload_from_costs(costs), m, policy, pcfg, table, dt=0.05)
        worst = max(worst, abs(sim - orc))
    assert worst <= 0.3


def test_oracle_single_task_single_worker():
    orc = oracle_job_time(workload_from_costs([0.7]), 1, LPT, ProtocolConfig(), UNIT, dt=0.05)
    assert 0.7 <= orc <= 0.7 + 0.3


def test_oracle_zero_cost_bound():
    m = 6
    pcfg = ProtocolConfig(poll_interval_s=0.3)
    orc = oracle_job_time(workload_from_costs([0.0] * m), 2, LPT, pcfg, UNIT, dt=0.05)
    sim = simulate_self_sched(workload_from_costs([0.0] * m), 2, LPT, pcfg, UNIT).job_time_s
    assert orc <= m * 0.3 + 1e-9
    assert sim <= m * 0.3 + 1e-9


def test_oracle_rejects_incommensurate_dt():
    with pytest.raises(ValueError):
        oracle_job_time(workload_from_costs([1.0]), 1, LPT, ProtocolConfig(), UNIT, dt=0.07)


# --- workloads -------------------------------------------------------------

def test_gaussian_dataset_count():
    wl = synth_workload("synthetic_gaussian", seed=1)
    assert len(wl) == 2425
    assert wl.sizes_mb().min() > 0
    assert all(t.time_key is not None for t in wl.tasks)


def test_heavy_tail_deterministic():
    a = synth_workload("synthetic_heavy_tail", 1000, seed=5)
    b = synth_workload("synthetic_heavy_tail", 1000, seed=5)
    assert [t.size_bytes for t in a.tasks] == [t.size_bytes for t in b.tasks]
    assert a.sizes_mb().max() <= 100.0 and a.sizes_mb().min() >= 1.0


def test_clustered_run_construction():
    wl = synth_workload("synthetic_clustered", 100, seed=3)
    sizes = [t.size_bytes for t in wl.tasks]
    run = sizes[:10]  # run_fraction 0.1
    assert run == sorted(run, reverse=True)
    assert int(np.argmax(sizes)) < 5
    assert min(run) >= max(sizes[10:])


def test_invalid_params():
    with pytest.raises(InvalidParams):
        synth_workload("synthetic_gaussian", 10, {"sd_mb": 0})
    with pytest.raises(InvalidParams):
        synth_workload("synthetic_heavy_tail", 10, {"max_mb": 0.5})
    with pytest.raises(InvalidParams):
        synth_workload("synthetic_gaussian", 0)


def test_clustered_cyclic_beats_block():
    cm = CostModel()
    for seed in range(3):
        wl = synth_workload("synthetic_clustered", 2000, seed=seed)
        block = simulate_static(wl, 64, "block", cm).job_time_s
        cyclic = simulate_static(wl, 64, "cyclic", cm).job_time_s
        selfs = simulate_self_sched(wl, 64, CHRONO, ProtocolConfig(), cm).job_time_s
        assert cyclic < block
        assert selfs <= block + 0.3 * len(wl)


# --- metrics ---------------------------------------------------------------

def test_top_share_quarter():
    assert top_share([1, 1, 1, 97], 0.25) == pytest.approx(0.97)


def test_uniform_busy_times():
    m = metrics_from_busy([2, 2, 2, 2])
    assert m.span_s == 0
    assert m.median_worker_busy_s == 2


def test_two_percent_hold_most_of_the_time():
    busy = [95.0] + [0.05] * 99
    assert top_share(busy, 0.02) > 0.95


def test_top_share_exact_with_fractions():
    busy = [Fraction(191, 4)] * 2 + [Fraction(9, 196)] * 98
    assert top_share(busy, 0.02) == Fraction(955, 1000)


@given(st.lists(st.floats(0, 1e4), min_size=1, max_size=50))
def test_metric_sanity(busy):
    shares = [top_share(busy, p / 20) for p in range(21)]
    assert all(0 <= s <= 1 + 1e-12 for s in shares)
    assert all(a <= b + 1e-12 for a, b in zip(shares, shares[1:]))
    assert shares[-1] == pytest.approx(1.0)
    pts = ecdf(busy)
    fr = [f for _, f in pts]
    assert fr == sorted(fr) and fr[-1] == 1.0
    assert [x for x, _ in pts] == sorted({*busy})


def test_trace_metrics_from_trace(tmp_path):
    trace = simulate_static(workload_from_costs([1, 1, 1, 97]), 2, "block", UNIT)
    m = trace_metrics(trace)
    assert m.job_time_s == pytest.approx(98)
    assert m.span_s == pytest.approx(96)
    write_ecdf_csv(m.busy_times, tmp_path / "ecdf.csv")
    lines = (tmp_path / "ecdf.csv").read_text().splitlines()
    assert lines[0] == "busy_time_s,cum_fraction"
    assert lines[-1].endswith(",1.000000")


# --- sweeps ----------------------------------------------------------------

def test_single_cell_sweep():
    wl = synth_workload("synthetic_gaussian", 200, seed=0)
    rows = benchmark_sweep(wl, [(15, 8)], [LPT], ProtocolConfig(), CostModel())
    assert len(rows) == 1 and rows[0].n_workers == 15


def test_paper_cells_sweep_shape_and_ordering(tmp_path):
    wl = synth_workload("synthetic_gaussian", seed=11)
    rows = benchmark_sweep(wl, TABLE_CELLS, [CHRONO, LPT], ProtocolConfig(), CostModel())
    by = {(r.policy, r.n_workers, r.nppn): r.job_time_s for r in rows}
    assert len(rows) == 2 * len(TABLE_CELLS)
    for nw, nppn in TABLE_CELLS:
        assert by[("largest_first", nw, nppn)] <= by[("chronological", nw, nppn)]
    table = render_markdown_table(rows, "largest_first", "largest first")
    assert "| NPPN | 2048 | 1024 | 512 | 256 |" in table
    assert "| 8 | - | - |" in table
    write_sweep_csv(rows, tmp_path / "sweep.csv")
    assert (tmp_path / "sweep.csv").read_text().startswith(
        "policy,n_workers,nppn,tasks_per_message,job_time_s\n")
    write_series_csv(rows, tmp_path / "fig4.csv", "allocated_cores")


def test_random_policy_sweep_is_reproducible():
    wl = synth_workload("synthetic_gaussian", 300, seed=0)
    pol = OrderingPolicy("random", seed=4)
    a = benchmark_sweep(wl, [(15, 8), (31, 16)], [pol], ProtocolConfig(), CostModel())
    b = benchmark_sweep(wl, [(15, 8), (31, 16)], [pol], ProtocolConfig(), CostModel())
    assert a == b


def test_tasks_per_message_degrades_dataset1_jobs():
    wl = synth_workload("synthetic_gaussian", seed=0)
    rows = benchmark_sweep(wl, [(511, 8)], [CHRONO], ProtocolConfig(), CostModel(),
                           tasks_per_message=[1, 2, 4, 8, 16, 32])
    times = [r.job_time_s for r in rows]
    assert times == sorted(times)
