"""Scheduler selection by name.

A scheduler is any callable ``(tasks, vms, seed) -> Mapping``.  Swarm
schedulers take their meta-parameters from a config dict and the seed from
the caller, so one instance can serve every rescheduling epoch of a run.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Sequence

from swarmsched.baselines import (
    PsoConfig,
    greedy_earliest_finish,
    random_mapping,
    round_robin,
    run_pso,
)
from swarmsched.errors import ConfigurationError
from swarmsched.model import Mapping, TaskSpec, VmSpec
from swarmsched.swarm import SwarmConfig, run

Scheduler = Callable[[Sequence[TaskSpec], Sequence[VmSpec], int], Mapping]

SCHEDULERS = ("psogsa", "pso", "rr", "greedy", "random")


def _config_from(cls, params):
    params = dict(params or {})
    params.pop("rng_seed", None)
    if "velocity_clamp" in params:
        params["velocity_clamp"] = tuple(params["velocity_clamp"])
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad {cls.__name__} parameters: {exc}") from None


def make_scheduler(name: str, params: dict | None = None) -> Scheduler:
    if name == "psogsa":
        base = _config_from(SwarmConfig, params)
        return lambda tasks, vms, seed: run(tasks, vms, replace(base, rng_seed=seed))
    if name == "pso":
        base = _config_from(PsoConfig, params)
        return lambda tasks, vms, seed: run_pso(tasks, vms, replace(base, rng_seed=seed))
    if params:
        raise ConfigurationError(f"scheduler {name!r} takes no parameters")
    if name == "rr":
        return lambda tasks, vms, seed: round_robin(tasks, vms)
    if name == "greedy":
        return lambda tasks, vms, seed: greedy_earliest_finish(tasks, vms)
    if name == "random":
        return random_mapping
    raise ConfigurationError(f"unknown scheduler {name!r}; choose from {', '.join(SCHEDULERS)}")
