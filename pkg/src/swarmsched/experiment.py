"""Batch experiments: config, per-(scheduler, seed) runs, CSV/JSON artifacts."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from swarmsched.errors import ConfigurationError
from swarmsched.model import VmSpec
from swarmsched.schedulers import SCHEDULERS, make_scheduler
from swarmsched.sim import MetricSample, SimConfig, SimSummary, run_simulation
from swarmsched.workload import WorkloadGenParams, generate_workload, load_workload

log = logging.getLogger(__name__)

TIMESERIES_HEADER = ("time", "avg_vm_load", "avg_processing_speed", "running_count")
SUMMARY_HEADER = ("scheduler", "seed", "time_avg_load", "time_avg_speed", "total_exec_time", "makespan", "completed")
METRICS = ("time_avg_load", "time_avg_speed", "total_exec_time", "makespan")
REFERENCE = "psogsa"

# datacenter block is carried for the record only; scheduling sees the flat VM list
DEFAULT_DATACENTER = {
    "datacenters": 1,
    "hosts_per_datacenter": 4,
    "pes_per_host": 1,
    "mips_per_pe": 1024,
    "ram_mb": 2048,
    "storage_mb": 1048576,
    "bandwidth_mbps": 10240,
}
DEFAULT_VM = {"count": 5, "pes": 2, "mips_per_pe": 128.0}


@dataclass
class ExperimentConfig:
    schedulers: list[str] = field(default_factory=lambda: ["psogsa", "pso"])
    seeds: list[int] = field(default_factory=lambda: [0])
    workload: WorkloadGenParams | None = field(default_factory=WorkloadGenParams)
    workload_path: str | None = None
    # a generator seed of None means "use the run seed"
    workload_seed_from_run: bool = False
    vm: dict = field(default_factory=lambda: dict(DEFAULT_VM))
    datacenter: dict = field(default_factory=lambda: dict(DEFAULT_DATACENTER))
    scheduler_params: dict = field(default_factory=dict)
    sample_interval: float = 1.0
    reschedule_on_arrival: bool = True
    output_dir: str = "results"

    def __post_init__(self):
        if not self.schedulers:
            raise ConfigurationError("at least one scheduler is required")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        for name in self.schedulers:
            if name not in SCHEDULERS:
                raise ConfigurationError(f"unknown scheduler {name!r}")
        for seed in self.seeds:
            if not (isinstance(seed, int) and 0 <= seed < 2**64):
                raise ConfigurationError(f"seed {seed!r} is not a 64-bit unsigned integer")
        if (self.workload is None) == (self.workload_path is None):
            raise ConfigurationError("give exactly one of a workload generator or a workload path")
        self.vms  # validates the VM block

    @property
    def vms(self) -> list[VmSpec]:
        try:
            count = int(self.vm["count"])
            pes = int(self.vm["pes"])
            mips = float(self.vm["mips_per_pe"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad vm block: {exc}") from None
        if count < 1:
            raise ConfigurationError("vm.count must be >= 1")
        return [VmSpec(id=j, pes=pes, mips_per_pe=mips) for j in range(count)]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        wl = data.pop("workload", None)
        kwargs = {}
        if isinstance(wl, dict) and "path" in wl:
            kwargs["workload"] = None
            kwargs["workload_path"] = str(wl["path"])
        elif isinstance(wl, dict):
            gen = dict(wl.get("generator", wl))
            if gen.get("rng_seed", 0) is None:
                gen.pop("rng_seed")
                kwargs["workload_seed_from_run"] = True
            kwargs["workload"] = WorkloadGenParams.from_dict(gen)
        elif wl is not None:
            raise ConfigurationError("workload must be an object")
        known = {"schedulers", "seeds", "vm", "datacenter", "scheduler_params",
                 "sample_interval", "reschedule_on_arrival", "output_dir"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs.update(data)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        if self.workload_path is not None:
            workload = {"path": self.workload_path}
        else:
            gen = self.workload.to_dict()
            if self.workload_seed_from_run:
                gen["rng_seed"] = None
            workload = {"generator": gen}
        return {
            "datacenter": self.datacenter,
            "vm": self.vm,
            "workload": workload,
            "schedulers": list(self.schedulers),
            "scheduler_params": self.scheduler_params,
            "seeds": list(self.seeds),
            "sample_interval": self.sample_interval,
            "reschedule_on_arrival": self.reschedule_on_arrival,
            "output_dir": self.output_dir,
        }

    def workload_for(self, seed: int):
        if self.workload_path is not None:
            return load_workload(self.workload_path)
        params = self.workload
        if self.workload_seed_from_run:
            params = WorkloadGenParams(**{**params.to_dict(), "rng_seed": seed})
        return generate_workload(params)


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    cfg = ExperimentConfig.from_dict(data)
    if cfg.workload_path is not None and not os.path.isabs(cfg.workload_path):
        cfg.workload_path = str((Path(path).parent / cfg.workload_path).resolve())
    return cfg


@dataclass
class RunRecord:
    scheduler: str
    seed: int
    samples: list[MetricSample]
    summary: SimSummary
    workload_size: int


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def timeseries_csv(samples) -> str:
    return _csv_text(
        TIMESERIES_HEADER,
        ((s.time, s.avg_vm_load, s.avg_processing_speed, s.running_count) for s in samples),
    )


def summary_rows(records) -> list[tuple]:
    rows = [
        (r.scheduler, r.seed, r.summary.time_avg_load, r.summary.time_avg_speed,
         r.summary.total_exec_time, r.summary.makespan, r.summary.completed)
        for r in records
    ]
    by_sched = {}
    for r in records:
        by_sched.setdefault(r.scheduler, []).append(r.summary)
    for name, sums in by_sched.items():
        rows.append(
            (name, "median")
            + tuple(float(statistics.median(getattr(s, m) for s in sums)) for m in METRICS)
            + (float(statistics.median(s.completed for s in sums)),)
        )
    return rows


def _check_writable(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-probe"
    probe.write_text("")
    probe.unlink()


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> list[RunRecord]:
    """Run every (scheduler, seed) pair and write the artifacts to ``out_dir``."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    _check_writable(out)
    vms = cfg.vms
    records = []
    for name in cfg.schedulers:
        scheduler = make_scheduler(name, cfg.scheduler_params.get(name))
        for seed in cfg.seeds:
            workload = cfg.workload_for(seed)
            sim_cfg = SimConfig(
                vms=vms,
                scheduler=scheduler,
                sample_interval=cfg.sample_interval,
                reschedule_on_arrival=cfg.reschedule_on_arrival,
                seed=seed,
            )
            log.info("running %s seed=%d on %d tasks", name, seed, len(workload))
            samples, summary = run_simulation(workload, sim_cfg)
            records.append(RunRecord(name, seed, samples, summary, len(workload)))
            (out / f"timeseries_{name}_{seed}.csv").write_text(timeseries_csv(samples), encoding="utf-8")
    (out / "summary.csv").write_text(_csv_text(SUMMARY_HEADER, summary_rows(records)), encoding="utf-8")
    (out / "manifest.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return records


def read_summary(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SUMMARY_HEADER:
            raise ConfigurationError(f"{path}: unexpected summary header {reader.fieldnames}")
        rows = []
        for row in reader:
            if row["seed"] == "median":
                continue
            parsed = {"scheduler": row["scheduler"], "seed": int(row["seed"])}
            for m in METRICS:
                parsed[m] = float(row[m])
            parsed["completed"] = int(row["completed"])
            rows.append(parsed)
    return rows


def compare_summary(rows: list[dict], reference: str = REFERENCE) -> dict:
    """Per-scheduler medians and relative deltas of ``reference`` against each.

    ``delta = (reference - other) / other``, so a negative load delta means the
    reference scheduler ran with less load.  Deltas are omitted when only one
    scheduler is present.
    """
    medians = {}
    for name in dict.fromkeys(r["scheduler"] for r in rows):
        mine = [r for r in rows if r["scheduler"] == name]
        medians[name] = {m: float(statistics.median(r[m] for r in mine)) for m in METRICS}
    report = {"reference": reference, "medians": medians, "deltas": {}}
    if len(medians) < 2 or reference not in medians:
        return report
    ref = medians[reference]
    for name, med in medians.items():
        if name == reference:
            continue
        report["deltas"][name] = {m: _relative(ref[m], med[m]) for m in METRICS}
    return report


def _relative(ref: float, other: float) -> float:
    if other == 0:
        return 0.0 if ref == 0 else math.copysign(math.inf, ref)
    return (ref - other) / other


def format_report(report: dict) -> str:
    lines = []
    names = list(report["medians"])
    width = max(len(n) for n in names + ["scheduler"])
    lines.append("scheduler".ljust(width) + "".join(f"  {m:>16}" for m in METRICS))
    for name in names:
        med = report["medians"][name]
        lines.append(name.ljust(width) + "".join(f"  {med[m]:>16.6g}" for m in METRICS))
    if report["deltas"]:
        lines.append("")
        lines.append(f"relative delta of {report['reference']} vs:")
        for name, d in report["deltas"].items():
            lines.append(name.ljust(width) + "".join(f"  {d[m]:>+16.2%}" for m in METRICS))
    return "\n".join(lines)
