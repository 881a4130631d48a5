"""Binary hybrid PSO/GSA search over one-hot task-to-VM matrices.

Each mass carries a binary ``(v, c)`` position matrix whose columns are
one-hot (task ``i`` runs on the VM of the row holding the 1), a real
velocity matrix of the same shape, and a fitness in seconds.  One
iteration:

1. gravitational constant ``G(t)`` and best/worst fitness of the population;
2. normalized mass values from fitness;
3. pairwise attraction forces and accelerations;
4. hybrid velocity: inertia + acceleration term + pull towards global best;
5. stochastic binarization through a time-varying sigmoid, then one-hot repair;
6. fitness, personal best and global best bookkeeping.

The population is stored as stacked arrays on :class:`SwarmState` and the
whole swarm moves synchronously; :class:`Mass` is a per-agent view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from swarmsched import _kernels
from swarmsched.errors import ConfigurationError
from swarmsched.model import Mapping, TaskSpec, VmSpec

FitnessFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SwarmConfig:
    population_size: int = 50
    max_iterations: int = 500
    G0: float = 1.0
    alpha: float = 20.0
    epsilon: float = math.exp(-1.0)
    w_max: float = 0.9
    w_min: float = 0.4
    phi_max: float = 1.0
    phi_min: float = 5.0
    velocity_clamp: tuple[float, float] = (-8.0, 8.0)
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        if not (self.G0 > 0 and self.alpha > 0 and self.epsilon > 0):
            raise ConfigurationError("G0, alpha and epsilon must be > 0")
        if self.w_max < self.w_min:
            raise ConfigurationError("w_max must be >= w_min")
        if not (self.phi_max > 0 and self.phi_min > 0):
            raise ConfigurationError("phi_max and phi_min must be > 0")
        lo, hi = self.velocity_clamp
        if not lo < hi:
            raise ConfigurationError("velocity_clamp must be an interval lo < hi")
        object.__setattr__(self, "velocity_clamp", (float(lo), float(hi)))
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ConfigurationError("rng_seed must be a 64-bit unsigned integer")


@dataclass
class Mass:
    """One search agent.  Arrays are views into the owning :class:`SwarmState`."""

    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    personal_best_position: np.ndarray
    fitness: float
    personal_best_fitness: float
    mass_value: float


@dataclass
class SwarmState:
    cfg: SwarmConfig
    vm_ids: tuple[int, ...]
    positions: np.ndarray  # (s, v, c) int8, one-hot columns
    velocities: np.ndarray  # (s, v, c)
    fitness: np.ndarray  # (s,)
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray  # (v, c)
    gbest_fitness: float
    rng: np.random.Generator
    iteration: int = 0
    G: float = 0.0
    best_fitness: float = 0.0
    worst_fitness: float = 0.0
    mass_values: np.ndarray = field(default=None)
    accelerations: np.ndarray = field(default=None)
    history: list[float] = field(default_factory=list)

    def __post_init__(self):
        s = self.positions.shape[0]
        if self.mass_values is None:
            self.mass_values = np.full(s, 1.0 / s)
        if self.accelerations is None:
            self.accelerations = np.zeros_like(self.velocities)

    @property
    def population_size(self) -> int:
        return self.positions.shape[0]

    @property
    def assignments(self) -> np.ndarray:
        return self.positions.argmax(axis=1)

    def mass(self, m: int) -> Mass:
        return Mass(
            position=self.positions[m],
            velocity=self.velocities[m],
            acceleration=self.accelerations[m],
            personal_best_position=self.pbest_positions[m],
            fitness=float(self.fitness[m]),
            personal_best_fitness=float(self.pbest_fitness[m]),
            mass_value=float(self.mass_values[m]),
        )

    @property
    def masses(self) -> list[Mass]:
        return [self.mass(m) for m in range(self.population_size)]


def onehot(assign: np.ndarray, n_vms: int) -> np.ndarray:
    """``(..., c)`` row indices -> ``(..., v, c)`` int8 one-hot matrices."""
    rows = np.arange(n_vms).reshape((1,) * (assign.ndim - 1) + (n_vms, 1))
    return (np.expand_dims(assign, -2) == rows).astype(np.int8)


def makespan_fitness(tasks: Sequence[TaskSpec], vms: Sequence[VmSpec]) -> FitnessFn:
    """Batch fitness: position stack ``(s, v, c)`` -> expected makespans ``(s,)``."""
    lengths = np.array([t.length for t in tasks], dtype=np.float64)
    caps = np.array([vm.capacity for vm in vms], dtype=np.float64)

    def fitness(positions: np.ndarray) -> np.ndarray:
        assign = np.ascontiguousarray(positions.argmax(axis=-2), dtype=np.int64)
        return _kernels.makespans(assign.reshape(-1, len(tasks)), lengths, caps)

    return fitness


def initialize_population(tasks, vms, cfg, fitness_fn=None):
    if not tasks:
        raise ConfigurationError("task list is empty")
    if not vms:
        raise ConfigurationError("VM list is empty")
    fitness_fn = fitness_fn or makespan_fitness(tasks, vms)
    s, v, c = cfg.population_size, len(vms), len(tasks)
    rng = np.random.default_rng(int(cfg.rng_seed))
    positions = onehot(rng.integers(0, v, size=(s, c)), v)
    fitness = np.asarray(fitness_fn(positions), dtype=np.float64)
    best = int(np.argmin(fitness))
    return SwarmState(
        cfg=cfg,
        vm_ids=tuple(vm.id for vm in vms),
        positions=positions,
        velocities=np.zeros((s, v, c)),
        fitness=fitness,
        pbest_positions=positions.copy(),
        pbest_fitness=fitness.copy(),
        gbest_position=positions[best].copy(),
        gbest_fitness=float(fitness[best]),
        rng=rng,
        history=[float(fitness[best])],
    )


def gravitational_constant(t, cfg):
    return cfg.G0 * math.exp(-cfg.alpha * t / cfg.max_iterations)


def schedules(t, cfg):
    """Return ``(w, c1, c2, phi)`` at iteration ``t``."""
    frac = t / cfg.max_iterations
    w = cfg.w_max - t * (cfg.w_max - cfg.w_min) / cfg.max_iterations
    c2 = frac**3
    c1 = 1.0 - c2
    phi = cfg.phi_max - t * (cfg.phi_max - cfg.phi_min) / cfg.max_iterations
    return w, c1, c2, phi


def mass_values_from_fitness(fitness: np.ndarray) -> np.ndarray:
    best, worst = fitness.min(), fitness.max()
    if best == worst:
        return np.full(fitness.shape, 1.0 / fitness.size)
    raw = (fitness - worst) / (best - worst)
    return raw / raw.sum()


def update_global_variables(state: SwarmState, t: int) -> SwarmState:
    state.G = gravitational_constant(t, state.cfg)
    state.best_fitness = float(state.fitness.min())
    state.worst_fitness = float(state.fitness.max())
    return state


def compute_mass_values(state: SwarmState) -> SwarmState:
    state.mass_values = mass_values_from_fitness(state.fitness)
    return state


def _force_draws(rng, shape):
    # two weights per (target, contributor, column): only the two differing
    # elements of a differing column carry force
    return rng.random(shape)


def compute_accelerations(state: SwarmState) -> SwarmState:
    s, _, c = state.positions.shape
    rand = _force_draws(state.rng, (s, s, 2, c))
    state.accelerations = _kernels.gravity_accelerations(
        np.ascontiguousarray(state.assignments, dtype=np.int64),
        state.mass_values,
        state.G,
        state.cfg.epsilon,
        rand,
        state.positions.shape[1],
    )
    return state


def compute_forces_and_acceleration(state: SwarmState, mass_index: int) -> Mass:
    """Acceleration of a single mass; stores it on ``state`` and returns the view."""
    s, v, c = state.positions.shape
    rand = np.zeros((s, s, 2, c))
    rand[mass_index] = _force_draws(state.rng, (s, 2, c))
    assign = np.ascontiguousarray(state.assignments, dtype=np.int64)
    acc = _kernels.gravity_accelerations(assign, state.mass_values, state.G, state.cfg.epsilon, rand, v)
    state.accelerations[mass_index] = acc[mass_index]
    return state.mass(mass_index)


def hybrid_velocity(velocity, position, acceleration, gbest, w, c1, c2, rng, clamp):
    r1 = rng.random(velocity.shape)
    r2 = rng.random(velocity.shape)
    new = w * velocity + c1 * r1 * acceleration + c2 * r2 * (gbest - position)
    return np.clip(new, clamp[0], clamp[1])


def update_velocity(mass: Mass, gbest, w, c1, c2, rng, clamp=(-8.0, 8.0)) -> Mass:
    mass.velocity[...] = hybrid_velocity(
        mass.velocity, mass.position, mass.acceleration, gbest, w, c1, c2, rng, clamp
    )
    return mass


def transfer_probability(v, phi):
    """``1 / (1 + exp(-v / phi))``, evaluated without overflow."""
    x = np.asarray(v, dtype=np.float64) / phi
    return np.exp(-np.logaddexp(0.0, -x))


def binarize(probs: np.ndarray, rng) -> np.ndarray:
    """Sample candidate bits from ``probs`` and repair columns to one-hot."""
    candidates = rng.random(probs.shape) < probs
    assign = _kernels.repair_onehot(candidates, probs)
    return onehot(assign, probs.shape[-2])


def update_position(mass: Mass, phi, rng) -> Mass:
    mass.position[...] = binarize(transfer_probability(mass.velocity, phi), rng)
    return mass


def record_bests(state: SwarmState) -> SwarmState:
    improved = state.fitness < state.pbest_fitness
    state.pbest_fitness[improved] = state.fitness[improved]
    state.pbest_positions[improved] = state.positions[improved]
    best = int(np.argmin(state.pbest_fitness))
    if state.pbest_fitness[best] < state.gbest_fitness:
        state.gbest_fitness = float(state.pbest_fitness[best])
        state.gbest_position = state.pbest_positions[best].copy()
    state.history.append(state.gbest_fitness)
    return state


def step(state: SwarmState, fitness_fn: FitnessFn) -> SwarmState:
    cfg = state.cfg
    if state.iteration >= cfg.max_iterations:
        raise ConfigurationError("swarm already ran max_iterations")
    t = state.iteration + 1
    update_global_variables(state, t)
    compute_mass_values(state)
    compute_accelerations(state)
    w, c1, c2, phi = schedules(t, cfg)
    state.velocities = hybrid_velocity(
        state.velocities, state.positions, state.accelerations, state.gbest_position,
        w, c1, c2, state.rng, cfg.velocity_clamp,
    )
    state.positions = binarize(transfer_probability(state.velocities, phi), state.rng)
    state.fitness = np.asarray(fitness_fn(state.positions), dtype=np.float64)
    record_bests(state)
    state.iteration = t
    return state


def decode(position: np.ndarray, vm_ids: Sequence[int]) -> Mapping:
    return Mapping(tuple(vm_ids[j] for j in position.argmax(axis=0)))


@dataclass
class SwarmResult:
    mapping: Mapping
    fitness: float
    history: list[float]
    state: SwarmState


def optimize(tasks, vms, cfg=None, fitness_fn=None) -> SwarmResult:
    cfg = cfg or SwarmConfig()
    fitness_fn = fitness_fn or makespan_fitness(tasks, vms)
    state = initialize_population(tasks, vms, cfg, fitness_fn)
    while state.iteration < cfg.max_iterations:
        step(state, fitness_fn)
    return SwarmResult(
        mapping=decode(state.gbest_position, state.vm_ids),
        fitness=state.gbest_fitness,
        history=state.history,
        state=state,
    )


def run(tasks, vms, cfg=None, fitness_fn=None) -> Mapping:
    return optimize(tasks, vms, cfg, fitness_fn).mapping
