"""Synthetic workload generation and the workload CSV format.

Tasks request ``2**k`` PEs (``k`` uniform over an exponent range) and their
length is the PE count times a uniform per-PE length, so wide jobs are also
long ones.  Tasks arrive in batches, either at a fixed interval or with
exponential inter-arrival gaps.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from swarmsched.errors import ConfigurationError, ValidationError, WorkloadParseError
from swarmsched.model import TaskSpec

CSV_HEADER = ("id", "submit_time", "length_mi", "pes")


@dataclass(frozen=True)
class WorkloadGenParams:
    task_count: int = 100
    pe_exponent_min: int = 2
    pe_exponent_max: int = 8
    per_pe_length_min: float = 500.0
    per_pe_length_max: float = 2000.0
    arrival: str = "fixed"  # or "exponential"
    mean_interarrival: float = 600.0
    batch_min: int = 5
    batch_max: int = 15
    rng_seed: int = 0

    def __post_init__(self):
        if self.task_count < 1:
            raise ConfigurationError("task_count must be >= 1")
        if not 0 <= self.pe_exponent_min <= self.pe_exponent_max:
            raise ConfigurationError("need 0 <= pe_exponent_min <= pe_exponent_max")
        if not 0 < self.per_pe_length_min <= self.per_pe_length_max:
            raise ConfigurationError("need 0 < per_pe_length_min <= per_pe_length_max")
        if self.arrival not in ("fixed", "exponential"):
            raise ConfigurationError(f"unknown arrival model {self.arrival!r}")
        if not self.mean_interarrival > 0:
            raise ConfigurationError("mean_interarrival must be > 0")
        if not 1 <= self.batch_min <= self.batch_max:
            raise ConfigurationError("need 1 <= batch_min <= batch_max")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ConfigurationError("rng_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "WorkloadGenParams":
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"bad workload parameters: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)


def generate_workload(p: WorkloadGenParams) -> list[TaskSpec]:
    rng = np.random.default_rng(int(p.rng_seed))
    n = p.task_count
    exponents = rng.integers(p.pe_exponent_min, p.pe_exponent_max + 1, size=n)
    pes = 2**exponents
    lengths = pes * rng.uniform(p.per_pe_length_min, p.per_pe_length_max, size=n)
    times = np.empty(n)
    i, clock = 0, 0.0
    while i < n:
        size = int(rng.integers(p.batch_min, p.batch_max + 1))
        times[i : i + size] = clock
        i += size
        gap = p.mean_interarrival if p.arrival == "fixed" else rng.exponential(p.mean_interarrival)
        clock += gap
    return [
        TaskSpec(id=k, length=float(lengths[k]), pes_required=int(pes[k]), submission_time=float(times[k]))
        for k in range(n)
    ]


def _sorted(tasks: Iterable[TaskSpec]) -> list[TaskSpec]:
    return sorted(tasks, key=lambda t: (t.submission_time, t.id))


def dumps_workload(tasks: Iterable[TaskSpec]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in tasks:
        writer.writerow([t.id, repr(float(t.submission_time)), repr(float(t.length)), t.pes_required])
    return buf.getvalue()


def write_workload(tasks: Iterable[TaskSpec], path) -> None:
    Path(path).write_text(dumps_workload(tasks), encoding="utf-8", newline="")


def loads_workload(text: str) -> list[TaskSpec]:
    rows = csv.reader(io.StringIO(text))
    tasks, seen = [], set()
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if lineno == 1 and tuple(c.strip() for c in row) == CSV_HEADER:
            continue
        if len(row) != 4:
            raise WorkloadParseError(f"expected 4 fields, got {len(row)}", lineno)
        try:
            tid, submit, length, pes = int(row[0]), float(row[1]), float(row[2]), int(row[3])
        except ValueError as exc:
            raise WorkloadParseError(str(exc), lineno) from None
        if tid in seen:
            raise ValidationError(f"line {lineno}: duplicate task id {tid}")
        try:
            tasks.append(TaskSpec(id=tid, length=length, pes_required=pes, submission_time=submit))
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        seen.add(tid)
    return _sorted(tasks)


def load_workload(path) -> list[TaskSpec]:
    return loads_workload(Path(path).read_text(encoding="utf-8"))
