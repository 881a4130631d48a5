"""Task/VM domain model and the expected-finish-time objective.

A VM shares its capacity equally among the ``n`` tasks mapped to it, so a
task of length ``L`` MI runs at ``capacity / n`` MIPS and needs
``L * n / capacity`` seconds.  The fitness of a mapping is the largest
per-VM finish time (expected makespan).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from swarmsched.errors import ConfigurationError, DomainError

BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True)
class TaskSpec:
    id: int
    length: float
    pes_required: int = 1
    submission_time: float = 0.0

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"task {self.id}: length must be > 0, got {self.length}")
        if self.pes_required < 1:
            raise DomainError(f"task {self.id}: pes_required must be >= 1")
        if self.submission_time < 0:
            raise DomainError(f"task {self.id}: submission_time must be >= 0")


@dataclass(frozen=True)
class VmSpec:
    id: int
    pes: int = 2
    mips_per_pe: float = 128.0
    capacity: float = field(init=False)

    def __post_init__(self):
        if self.pes < 1 or not self.mips_per_pe > 0:
            raise DomainError(f"vm {self.id}: pes and mips_per_pe must be positive")
        object.__setattr__(self, "capacity", self.pes * self.mips_per_pe)


@dataclass(frozen=True)
class Mapping:
    """``assignment[i]`` is the id of the VM hosting task ``i``."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def __len__(self):
        return len(self.assignment)

    def __getitem__(self, i):
        return self.assignment[i]


def processing_speed(vm: VmSpec, n: int) -> float:
    if n < 1:
        raise DomainError("processing speed is undefined for an empty VM")
    return vm.capacity / n


def execution_time(task: TaskSpec, ps: float) -> float:
    if not ps > 0:
        raise DomainError(f"processing speed must be > 0, got {ps}")
    return task.length / ps


def vm_index(vms: Sequence[VmSpec]) -> dict[int, int]:
    index = {vm.id: j for j, vm in enumerate(vms)}
    if len(index) != len(vms):
        raise ConfigurationError("VM ids must be unique")
    return index


def assignment_indices(mapping: Mapping, vms: Sequence[VmSpec]) -> np.ndarray:
    """Translate VM ids in ``mapping`` to row indices into ``vms``."""
    index = vm_index(vms)
    try:
        return np.array([index[a] for a in mapping.assignment], dtype=np.int64)
    except KeyError as exc:
        raise DomainError(f"mapping refers to unknown VM id {exc.args[0]}") from None


def vm_finish_times(assign: np.ndarray, lengths: np.ndarray, capacities: np.ndarray) -> np.ndarray:
    """Per-VM expected finish time for one assignment vector of row indices."""
    v = len(capacities)
    work = np.bincount(assign, weights=lengths, minlength=v)
    counts = np.bincount(assign, minlength=v)
    return work * counts / capacities


def mapping_fitness(mapping: Mapping, tasks: Sequence[TaskSpec], vms: Sequence[VmSpec]) -> float:
    if len(mapping) != len(tasks):
        raise DomainError(f"mapping has {len(mapping)} entries for {len(tasks)} tasks")
    if not tasks:
        return 0.0
    assign = assignment_indices(mapping, vms)
    lengths = np.array([t.length for t in tasks], dtype=float)
    caps = np.array([vm.capacity for vm in vms], dtype=float)
    return float(vm_finish_times(assign, lengths, caps).max())


def brute_force_optimum(tasks: Sequence[TaskSpec], vms: Sequence[VmSpec]) -> tuple[Mapping, float]:
    """Enumerate every mapping; ties go to the lexicographically smallest one."""
    if not vms:
        raise ConfigurationError("no VMs")
    v, c = len(vms), len(tasks)
    if v**c > BRUTE_FORCE_LIMIT:
        raise ConfigurationError(f"{v}^{c} mappings exceeds the enumeration limit")
    lengths = np.array([t.length for t in tasks], dtype=float)
    caps = np.array([vm.capacity for vm in vms], dtype=float)
    best, best_value = None, np.inf
    # product() yields index tuples in lexicographic order, so strict < keeps the first minimizer
    for combo in itertools.product(range(v), repeat=c):
        value = float(vm_finish_times(np.array(combo, dtype=np.int64), lengths, caps).max()) if c else 0.0
        if value < best_value:
            best, best_value = combo, value
    return Mapping(tuple(vms[j].id for j in best)), best_value
