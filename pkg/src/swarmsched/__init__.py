"""Load-balancing task scheduling with a binary hybrid PSO/GSA swarm."""

from swarmsched._kernels import BACKEND
from swarmsched.baselines import (
    PsoConfig,
    greedy_earliest_finish,
    optimize_pso,
    random_mapping,
    round_robin,
    run_pso,
)
from swarmsched.errors import (
    ConfigurationError,
    DomainError,
    SimulationError,
    ValidationError,
    WorkloadParseError,
)
from swarmsched.model import (
    Mapping,
    TaskSpec,
    VmSpec,
    brute_force_optimum,
    execution_time,
    mapping_fitness,
    processing_speed,
)
from swarmsched.sim import MetricSample, SimConfig, SimSummary, run_simulation
from swarmsched.swarm import Mass, SwarmConfig, SwarmState, optimize, run
from swarmsched.workload import WorkloadGenParams, generate_workload, load_workload

__version__ = "0.1.0"
