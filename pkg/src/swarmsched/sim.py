"""Discrete-event simulator of processor-sharing VMs with periodic rescheduling.

Each VM splits its capacity equally among its active tasks, so between
events every task drains at the constant rate ``capacity / n``.  Events are
task arrivals (which trigger a rescheduling of every incomplete task),
task completions and fixed-interval sample ticks.  At one timestamp the
loop applies arrivals, then completions, then takes one sample.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from swarmsched.errors import ConfigurationError, SimulationError
from swarmsched.model import Mapping, TaskSpec, VmSpec, assignment_indices
from swarmsched.schedulers import Scheduler

log = logging.getLogger(__name__)

# remaining work below this fraction of the task length counts as done
_SNAP_REL = 1e-9
# ... as does work that would finish within this many seconds
_SNAP_SECONDS = 1e-9
_OVERSHOOT_REL = 1e-6


@dataclass
class SimConfig:
    vms: Sequence[VmSpec]
    scheduler: Scheduler
    sample_interval: float = 1.0
    reschedule_on_arrival: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.vms:
            raise ConfigurationError("simulation needs at least one VM")
        if not self.sample_interval > 0:
            raise ConfigurationError("sample_interval must be > 0")


@dataclass(frozen=True)
class MetricSample:
    time: float
    avg_vm_load: float
    avg_processing_speed: float
    running_count: int


@dataclass(frozen=True)
class SimSummary:
    time_avg_load: float
    time_avg_speed: float
    total_exec_time: float
    makespan: float
    completed: int
    completed_work: float
    integrated_work: float


@dataclass
class SimState:
    vms: Sequence[VmSpec]
    clock: float = 0.0
    pending_arrivals: deque = field(default_factory=deque)
    # one {task id: remaining MI} dict per VM, in VM list order
    active: list = field(default=None)
    completed: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    tasks: dict = field(default_factory=dict)
    next_sample: float = 0.0
    epoch: int = 0
    integrated_work: float = 0.0
    load_integral: float = 0.0
    speed_integral: float = 0.0

    def __post_init__(self):
        if self.active is None:
            self.active = [{} for _ in self.vms]

    @property
    def running_count(self) -> int:
        return sum(len(q) for q in self.active)

    def idle(self) -> bool:
        return not self.pending_arrivals and self.running_count == 0


def _rates(state):
    return [vm.capacity / len(q) if q else 0.0 for vm, q in zip(state.vms, state.active)]


def progress(state: SimState, dt: float) -> SimState:
    """Advance the clock by ``dt`` with piecewise-constant rates.

    The caller must not step over an interior completion; overshooting by
    more than rounding noise raises :class:`SimulationError`.
    """
    if not dt > 0:
        raise SimulationError(f"progress needs dt > 0, got {dt}")
    rates = _rates(state)
    v = len(state.vms)
    running = state.running_count
    if running:
        busy = sum(vm.capacity for vm, q in zip(state.vms, state.active) if q)
        state.speed_integral += dt * busy / running
    end = state.clock + dt
    for vm, queue, rate in zip(state.vms, state.active, rates):
        if not queue:
            continue
        before = sum(queue.values())
        done = []
        for tid in queue:
            left = queue[tid] - dt * rate
            length = state.tasks[tid].length
            if left < -_OVERSHOOT_REL * length:
                raise SimulationError(
                    f"dt={dt} overshoots completion of task {tid} at t={state.clock}"
                )
            if left <= _SNAP_REL * length or left / rate <= _SNAP_SECONDS:
                left = 0.0
                done.append(tid)
            queue[tid] = left
        after = sum(queue.values())
        state.load_integral += dt * 0.5 * (before + after) / vm.capacity / v
        state.integrated_work += dt * vm.capacity
        for tid in done:
            del queue[tid]
            state.completed[tid] = end
    state.clock = end
    return state


def next_event_time(state: SimState) -> float:
    t = math.inf
    if state.pending_arrivals:
        t = state.pending_arrivals[0].submission_time
    for rate, queue in zip(_rates(state), state.active):
        if queue:
            t = min(t, state.clock + min(queue.values()) / rate)
    if not state.idle():
        t = min(t, state.next_sample)
    return t


def _epoch_seed(seed: int, epoch: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(epoch,))
    return int(ss.generate_state(1, np.uint64)[0])


def reschedule(state: SimState, scheduler: Scheduler, arrivals=(), seed: int = 0, everything=True):
    """Hand incomplete work to ``scheduler`` and apply its mapping.

    With ``everything`` the batch holds the new arrivals plus every active
    task at its remaining length, and placements may migrate for free;
    otherwise only the arrivals are placed.
    """
    batch = list(arrivals)
    if everything:
        for queue in state.active:
            for tid, left in queue.items():
                t = state.tasks[tid]
                batch.append(TaskSpec(t.id, left, t.pes_required, t.submission_time))
    if not batch:
        return state
    batch.sort(key=lambda t: (t.submission_time, t.id))
    log.debug("epoch %d at t=%.6g: scheduling %d tasks", state.epoch, state.clock, len(batch))
    try:
        mapping = scheduler(batch, list(state.vms), _epoch_seed(seed, state.epoch))
        if not isinstance(mapping, Mapping) or len(mapping) != len(batch):
            raise ValueError(f"scheduler returned {mapping!r} for {len(batch)} tasks")
        rows = assignment_indices(mapping, state.vms)
    except Exception as exc:
        raise SimulationError(
            f"scheduler failed at t={state.clock} (epoch {state.epoch}, {len(batch)} tasks): {exc}"
        ) from exc
    if everything:
        for queue in state.active:
            queue.clear()
    for task, j in zip(batch, rows):
        state.active[j][task.id] = task.length
    state.epoch += 1
    return state


def sample_metrics(state: SimState) -> MetricSample:
    loads = [sum(q.values()) / vm.capacity for vm, q in zip(state.vms, state.active)]
    running = state.running_count
    speed = 0.0
    if running:
        # mean over tasks of capacity/n collapses to busy capacity / running tasks
        speed = sum(vm.capacity for vm, q in zip(state.vms, state.active) if q) / running
    sample = MetricSample(state.clock, sum(loads) / len(loads), speed, running)
    state.samples.append(sample)
    return sample


def run_simulation(workload: Sequence[TaskSpec], cfg: SimConfig):
    """Run ``workload`` to completion; returns ``(samples, summary)``."""
    tasks = sorted(workload, key=lambda t: (t.submission_time, t.id))
    state = SimState(vms=list(cfg.vms), pending_arrivals=deque(tasks))
    state.tasks = {t.id: t for t in tasks}
    if len(state.tasks) != len(tasks):
        raise ConfigurationError("workload task ids must be unique")
    interval = cfg.sample_interval
    while True:
        arrivals = []
        while state.pending_arrivals and state.pending_arrivals[0].submission_time <= state.clock:
            arrivals.append(state.pending_arrivals.popleft())
        if arrivals:
            reschedule(state, cfg.scheduler, arrivals, cfg.seed, cfg.reschedule_on_arrival)
        if state.clock >= state.next_sample:
            state.next_sample = (math.floor(state.clock / interval) + 1) * interval
        sample_metrics(state)
        if state.idle():
            break
        # the clock must strictly advance for the loop to terminate
        t = next_event_time(state)
        if not t > state.clock:
            raise SimulationError(f"no progress possible at t={state.clock}")
        progress(state, t - state.clock)
    return state.samples, summarize(state, tasks)


def summarize(state: SimState, tasks: Sequence[TaskSpec]) -> SimSummary:
    if not tasks:
        return SimSummary(0.0, 0.0, 0.0, 0.0, 0, 0.0, 0.0)
    start = tasks[0].submission_time
    end = max(state.completed.values())
    span = end - start
    total_exec = sum(state.completed[t.id] - t.submission_time for t in tasks)
    return SimSummary(
        time_avg_load=state.load_integral / span if span > 0 else 0.0,
        time_avg_speed=state.speed_integral / span if span > 0 else 0.0,
        total_exec_time=total_exec,
        makespan=span,
        completed=len(state.completed),
        completed_work=sum(t.length for t in tasks if t.id in state.completed),
        integrated_work=state.integrated_work,
    )
