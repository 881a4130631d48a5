"""Comparison schedulers.

``optimize_pso`` is binary PSO on the same one-hot encoding, repair, fitness,
clamp and seeding as the hybrid; only the velocity rule differs (personal
best replaces the gravitational acceleration, and c1/c2 are constants).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from swarmsched.errors import ConfigurationError
from swarmsched.model import Mapping, TaskSpec, VmSpec
from swarmsched.swarm import (
    SwarmResult,
    binarize,
    decode,
    initialize_population,
    makespan_fitness,
    record_bests,
    transfer_probability,
)


@dataclass(frozen=True)
class PsoConfig:
    population_size: int = 50
    max_iterations: int = 500
    w_max: float = 0.9
    w_min: float = 0.4
    c1: float = 2.0
    c2: float = 2.0
    velocity_clamp: tuple[float, float] = (-8.0, 8.0)
    rng_seed: int = 0
    # "static" = plain sigmoid; "time_varying" borrows the hybrid's phi schedule
    transfer: str = "static"
    phi_max: float = 1.0
    phi_min: float = 5.0

    def __post_init__(self):
        if self.population_size < 1:
            raise ConfigurationError("population_size must be >= 1")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        if self.w_max < self.w_min:
            raise ConfigurationError("w_max must be >= w_min")
        if self.transfer not in ("static", "time_varying"):
            raise ConfigurationError(f"unknown transfer {self.transfer!r}")
        lo, hi = self.velocity_clamp
        if not lo < hi:
            raise ConfigurationError("velocity_clamp must be an interval lo < hi")
        object.__setattr__(self, "velocity_clamp", (float(lo), float(hi)))
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ConfigurationError("rng_seed must be a 64-bit unsigned integer")


def pso_velocity(velocity, position, pbest, gbest, w, c1, c2, rng, clamp=(-8.0, 8.0)):
    r1 = rng.random(velocity.shape)
    r2 = rng.random(velocity.shape)
    new = w * velocity + c1 * r1 * (pbest - position) + c2 * r2 * (gbest - position)
    return np.clip(new, clamp[0], clamp[1])


def sigmoid(v):
    return transfer_probability(v, 1.0)


def pso_position(velocity, rng):
    return binarize(sigmoid(velocity), rng)


def optimize_pso(tasks, vms, cfg=None, fitness_fn=None) -> SwarmResult:
    cfg = cfg or PsoConfig()
    fitness_fn = fitness_fn or makespan_fitness(tasks, vms)
    state = initialize_population(tasks, vms, cfg, fitness_fn)
    t_max = cfg.max_iterations
    for t in range(1, t_max + 1):
        w = cfg.w_max - t * (cfg.w_max - cfg.w_min) / t_max
        state.velocities = pso_velocity(
            state.velocities, state.positions, state.pbest_positions, state.gbest_position,
            w, cfg.c1, cfg.c2, state.rng, cfg.velocity_clamp,
        )
        if cfg.transfer == "static":
            probs = sigmoid(state.velocities)
        else:
            phi = cfg.phi_max - t * (cfg.phi_max - cfg.phi_min) / t_max
            probs = transfer_probability(state.velocities, phi)
        state.positions = binarize(probs, state.rng)
        state.fitness = np.asarray(fitness_fn(state.positions), dtype=np.float64)
        record_bests(state)
        state.iteration = t
    return SwarmResult(
        mapping=decode(state.gbest_position, state.vm_ids),
        fitness=state.gbest_fitness,
        history=state.history,
        state=state,
    )


def run_pso(tasks, vms, cfg=None, fitness_fn=None) -> Mapping:
    return optimize_pso(tasks, vms, cfg, fitness_fn).mapping


def _require_vms(vms):
    if not vms:
        raise ConfigurationError("VM list is empty")


def round_robin(tasks: Sequence[TaskSpec], vms: Sequence[VmSpec]) -> Mapping:
    _require_vms(vms)
    order = sorted(range(len(tasks)), key=lambda i: (tasks[i].submission_time, tasks[i].id))
    assignment = [0] * len(tasks)
    for k, i in enumerate(order):
        assignment[i] = vms[k % len(vms)].id
    return Mapping(tuple(assignment))


def greedy_earliest_finish(tasks: Sequence[TaskSpec], vms: Sequence[VmSpec]) -> Mapping:
    """Longest task first onto the VM whose crowded finish time grows least."""
    _require_vms(vms)
    caps = np.array([vm.capacity for vm in vms])
    work = np.zeros(len(vms))
    counts = np.zeros(len(vms))
    assignment = [0] * len(tasks)
    order = sorted(range(len(tasks)), key=lambda i: (-tasks[i].length, tasks[i].id))
    for i in order:
        finish = (work + tasks[i].length) * (counts + 1) / caps
        j = int(np.argmin(finish))
        work[j] += tasks[i].length
        counts[j] += 1
        assignment[i] = vms[j].id
    return Mapping(tuple(assignment))


def random_mapping(tasks, vms, rng_seed=0) -> Mapping:
    _require_vms(vms)
    rng = np.random.default_rng(int(rng_seed))
    picks = rng.integers(0, len(vms), size=len(tasks))
    return Mapping(tuple(vms[j].id for j in picks))
