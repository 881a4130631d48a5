"""``swarmsched`` command line: run experiments, generate workloads, compare runs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from swarmsched.errors import ConfigurationError, SimulationError, ValidationError
from swarmsched.experiment import (
    ExperimentConfig,
    compare_summary,
    format_report,
    load_config,
    read_summary,
    run_experiment,
)
from swarmsched.schedulers import SCHEDULERS
from swarmsched.workload import WorkloadGenParams, generate_workload, write_workload

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _cmd_run(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.scheduler:
        cfg = replace(cfg, schedulers=[args.scheduler])
    if args.seed is not None:
        cfg = replace(cfg, seeds=[args.seed])
    out = args.out or cfg.output_dir
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    records = run_experiment(cfg, out)
    for r in records:
        s = r.summary
        print(f"{r.scheduler:>7} seed={r.seed:<6} load={s.time_avg_load:.6g} "
              f"speed={s.time_avg_speed:.6g} makespan={s.makespan:.6g} completed={s.completed}")
    print(f"wrote {len(records)} time series, summary.csv and manifest.json to {out}")


def _cmd_gen(args):
    try:
        data = json.loads(Path(args.params).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{args.params}: invalid JSON: {exc}") from None
    tasks = generate_workload(WorkloadGenParams.from_dict(data))
    write_workload(tasks, args.out)
    print(f"wrote {len(tasks)} tasks to {args.out}")


def _cmd_compare(args):
    rows = read_summary(args.summary)
    report = compare_summary(rows, reference=args.reference)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_report(report))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmsched", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate schedulers over seeds and write CSV artifacts")
    run.add_argument("--config", help="experiment JSON (a previous manifest.json works too)")
    run.add_argument("--scheduler", choices=SCHEDULERS, help="run only this scheduler")
    run.add_argument("--seed", type=int, help="run only this seed")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("gen", help="generate a synthetic workload CSV")
    gen.add_argument("--params", required=True, help="workload generator JSON")
    gen.add_argument("--out", required=True, help="destination CSV")
    gen.set_defaults(func=_cmd_gen)

    cmp_ = sub.add_parser("compare", help="median metrics and deltas from a summary.csv")
    cmp_.add_argument("--summary", required=True)
    cmp_.add_argument("--reference", default="psogsa")
    cmp_.add_argument("--json", action="store_true", help="emit the report as JSON")
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigurationError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
