import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmsched.baselines import greedy_earliest_finish, round_robin
from swarmsched.errors import ConfigurationError, SimulationError
from swarmsched.model import Mapping, TaskSpec, VmSpec
from swarmsched.schedulers import make_scheduler
from swarmsched.sim import (
    SimConfig,
    SimState,
    next_event_time,
    progress,
    reschedule,
    run_simulation,
    sample_metrics,
)

VM256 = VmSpec(0, pes=2, mips_per_pe=128)


def rr(tasks, vms, seed):
    return round_robin(tasks, vms)


def greedy(tasks, vms, seed):
    return greedy_earliest_finish(tasks, vms)


class Recorder:
    """Scheduler wrapper that keeps every batch it was handed."""

    def __init__(self, inner=rr):
        self.inner = inner
        self.batches = []

    def __call__(self, tasks, vms, seed):
        self.batches.append([(t.id, t.length) for t in tasks])
        return self.inner(tasks, vms, seed)


def state_with(vms, placements, tasks, clock=0.0):
    state = SimState(vms=list(vms), clock=clock)
    state.tasks = {t.id: t for t in tasks}
    for j, tid, left in placements:
        state.active[j][tid] = left
    return state


class TestProgress:
    def test_shared_vm(self):
        tasks = [TaskSpec(1, 256.0), TaskSpec(2, 256.0)]
        state = state_with([VM256], [(0, 1, 256.0), (0, 2, 256.0)], tasks)
        progress(state, 1.0)
        assert state.active[0] == {1: 128.0, 2: 128.0}
        assert state.clock == 1.0

    def test_completion_exactly(self):
        state = state_with([VM256], [(0, 1, 256.0)], [TaskSpec(1, 256.0)], clock=4.0)
        progress(state, 1.0)
        assert state.completed == {1: 5.0}
        assert state.active[0] == {}

    def test_idle(self):
        state = state_with([VM256], [], [])
        progress(state, 2.5)
        assert state.clock == 2.5 and state.integrated_work == 0.0

    def test_overshoot_is_an_error(self):
        state = state_with([VM256], [(0, 1, 256.0)], [TaskSpec(1, 256.0)])
        with pytest.raises(SimulationError):
            progress(state, 2.0)

    def test_nonpositive_dt(self):
        with pytest.raises(SimulationError):
            progress(state_with([VM256], [], []), 0.0)


class TestNextEvent:
    def test_completion_before_arrival(self):
        state = state_with([VM256], [(0, 1, 768.0)], [TaskSpec(1, 768.0)])
        state.pending_arrivals = deque([TaskSpec(2, 5.0, submission_time=5.0)])
        state.next_sample = 100.0
        assert next_event_time(state) == 3.0

    def test_arrival_into_empty_system(self):
        state = state_with([VM256], [], [])
        state.pending_arrivals = deque([TaskSpec(2, 5.0, submission_time=10.0)])
        state.next_sample = 100.0
        assert next_event_time(state) == 10.0

    def test_shared_projection(self):
        tasks = [TaskSpec(1, 128.0), TaskSpec(2, 256.0)]
        state = state_with([VM256], [(0, 1, 128.0), (0, 2, 256.0)], tasks, clock=7.0)
        state.next_sample = 100.0
        assert next_event_time(state) == 8.0

    def test_nothing_left(self):
        assert next_event_time(state_with([VM256], [], [])) == math.inf

    def test_sample_tick(self):
        state = state_with([VM256], [(0, 1, 1e6)], [TaskSpec(1, 1e6)])
        state.next_sample = 1.0
        assert next_event_time(state) == 1.0


class TestReschedule:
    def test_first_batch(self):
        vms = [VmSpec(0), VmSpec(1)]
        tasks = [TaskSpec(i, 10.0 * (i + 1)) for i in range(3)]
        state = state_with(vms, [], tasks)
        reschedule(state, greedy, tasks)
        want = greedy_earliest_finish(tasks, vms)
        for task, vm_id in zip(tasks, want.assignment):
            assert task.id in state.active[vm_id]

    def test_running_tasks_enter_with_remaining_work(self):
        rec = Recorder()
        wl = [TaskSpec(1, 512.0, submission_time=0.0), TaskSpec(2, 100.0, submission_time=1.0)]
        run_simulation(wl, SimConfig([VM256], rec))
        # task 1 ran alone at 256 MIPS for 1 s before task 2 arrived
        assert rec.batches == [[(1, 512.0)], [(1, 256.0), (2, 100.0)]]

    def test_deterministic(self):
        vms = [VmSpec(0), VmSpec(1), VmSpec(2)]
        tasks = [TaskSpec(i, float(3 + i)) for i in range(5)]
        sched = make_scheduler("psogsa", {"population_size": 5, "max_iterations": 10})
        placements = []
        for _ in range(2):
            state = state_with(vms, [], tasks)
            reschedule(state, sched, tasks, seed=9)
            placements.append([dict(q) for q in state.active])
        assert placements[0] == placements[1]

    def test_only_arrivals_when_disabled(self):
        rec = Recorder()
        wl = [TaskSpec(1, 512.0), TaskSpec(2, 100.0, submission_time=1.0)]
        run_simulation(wl, SimConfig([VM256], rec, reschedule_on_arrival=False))
        assert rec.batches == [[(1, 512.0)], [(2, 100.0)]]

    def test_failure_is_wrapped(self):
        def broken(tasks, vms, seed):
            return Mapping((99,) * len(tasks))

        with pytest.raises(SimulationError, match="scheduler failed"):
            run_simulation([TaskSpec(1, 5.0)], SimConfig([VM256], broken))


class TestSampleMetrics:
    def test_load(self):
        state = state_with([VM256], [(0, 1, 300.0), (0, 2, 212.0)], [TaskSpec(1, 300.0), TaskSpec(2, 212.0)])
        s = sample_metrics(state)
        assert s.avg_vm_load == 2.0
        assert s.avg_processing_speed == 128.0
        assert s.running_count == 2

    def test_idle(self):
        s = sample_metrics(state_with([VM256, VmSpec(1)], [], []))
        assert (s.avg_vm_load, s.avg_processing_speed, s.running_count) == (0.0, 0.0, 0)

    def test_alone(self):
        s = sample_metrics(state_with([VM256], [(0, 1, 5.0)], [TaskSpec(1, 5.0)]))
        assert s.avg_processing_speed == 256.0

    def test_mean_over_tasks(self):
        vms = [VmSpec(0, pes=1, mips_per_pe=100), VmSpec(1, pes=1, mips_per_pe=300)]
        tasks = [TaskSpec(i, 1.0) for i in range(3)]
        state = state_with(vms, [(0, 0, 1.0), (0, 1, 1.0), (1, 2, 1.0)], tasks)
        # per-task speeds 50, 50, 300
        assert sample_metrics(state).avg_processing_speed == pytest.approx(400 / 3)


class TestRunSimulation:
    def test_single_task(self):
        samples, summary = run_simulation([TaskSpec(1, 256.0)], SimConfig([VM256], rr))
        assert summary.makespan == 1.0
        assert summary.total_exec_time == 1.0
        assert summary.completed == 1
        assert samples[-1].time == 1.0 and samples[-1].running_count == 0

    def test_empty(self):
        samples, summary = run_simulation([], SimConfig([VM256], rr))
        assert [s.time for s in samples] == [0.0]
        assert summary.time_avg_load == summary.makespan == summary.total_exec_time == 0.0
        assert summary.completed == 0

    def test_symmetric_pair_finishes_together(self):
        wl = [TaskSpec(1, 512.0), TaskSpec(2, 512.0)]
        samples, summary = run_simulation(wl, SimConfig([VmSpec(0), VmSpec(1)], greedy))
        assert summary.makespan == 2.0
        assert summary.total_exec_time == 4.0
        assert samples[-2].running_count == 2

    def test_hand_trace(self):
        vm = VmSpec(0, pes=1, mips_per_pe=100)
        wl = [TaskSpec(1, 200.0), TaskSpec(2, 100.0, submission_time=1.0)]
        samples, summary = run_simulation(wl, SimConfig([vm], rr, sample_interval=10.0))
        # [0,1]: A alone at 100; [1,3]: A and B share at 50 each, both drain by t=3
        assert [s.time for s in samples] == [0.0, 1.0, 3.0]
        assert summary.makespan == 3.0
        assert summary.total_exec_time == 5.0
        assert summary.time_avg_load == pytest.approx(3.5 / 3, rel=1e-12)
        assert summary.time_avg_speed == pytest.approx(200 / 3, rel=1e-12)

    def test_one_vm_one_task_duration(self):
        vm = VmSpec(0, pes=3, mips_per_pe=77.0)
        _, summary = run_simulation([TaskSpec(1, 1234.5, submission_time=2.0)], SimConfig([vm], rr))
        assert summary.total_exec_time == 1234.5 / vm.capacity

    def test_duplicate_ids(self):
        with pytest.raises(ConfigurationError):
            run_simulation([TaskSpec(1, 5.0), TaskSpec(1, 6.0)], SimConfig([VM256], rr))

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            SimConfig([], rr)
        with pytest.raises(ConfigurationError):
            SimConfig([VM256], rr, sample_interval=0)


workloads = st.lists(
    st.tuples(st.floats(1.0, 5e3), st.floats(0.0, 50.0)), min_size=1, max_size=12
).map(lambda rows: [TaskSpec(i, l, submission_time=round(t, 1)) for i, (l, t) in enumerate(rows)])


@settings(max_examples=60, deadline=None)
@given(wl=workloads, v=st.integers(1, 4), name=st.sampled_from(["rr", "greedy", "random"]), seed=st.integers(0, 99))
def test_conservation_and_no_loss(wl, v, name, seed):
    vms = [VmSpec(j, pes=1 + j, mips_per_pe=50.0) for j in range(v)]
    samples, summary = run_simulation(wl, SimConfig(vms, make_scheduler(name), sample_interval=3.0, seed=seed))
    total = sum(t.length for t in wl)
    assert summary.completed == len(wl)
    assert summary.completed_work == pytest.approx(total, rel=1e-12)
    assert summary.integrated_work == pytest.approx(total, rel=1e-6)
    times = [s.time for s in samples]
    assert all(b > a for a, b in zip(times, times[1:]))
    for s in samples:
        assert all(math.isfinite(x) and x >= 0 for x in (s.time, s.avg_vm_load, s.avg_processing_speed))


def test_deterministic_series():
    rng = np.random.default_rng(0)
    wl = [TaskSpec(i, float(x), submission_time=float(i // 3) * 4) for i, x in enumerate(rng.uniform(100, 2000, 12))]
    vms = [VmSpec(j) for j in range(3)]
    sched = make_scheduler("psogsa", {"population_size": 6, "max_iterations": 15})
    a, _ = run_simulation(wl, SimConfig(vms, sched, seed=5))
    b, _ = run_simulation(wl, SimConfig(vms, sched, seed=5))
    assert a == b
