"""Time the numba kernels against the numpy fallback.

Kernel timings call both kernel modules directly in this process.  The
end-to-end timing launches one subprocess per backend with
SWARMSCHED_BACKEND set, since the backend is fixed at import.

    python3 benchmarks/bench_backends.py [--swarm 50] [--tasks 30] [--vms 5]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from swarmsched._kernels import _numpy

try:
    from swarmsched._kernels import _numba
except ImportError:
    _numba = None

END_TO_END = """
import json, sys, time
from swarmsched import BACKEND
from swarmsched.model import VmSpec
from swarmsched.swarm import SwarmConfig, optimize
from swarmsched.workload import WorkloadGenParams, generate_workload
s, c, v, iters = map(int, sys.argv[1:5])
tasks = generate_workload(WorkloadGenParams(task_count=c, rng_seed=1))
vms = [VmSpec(j) for j in range(v)]
cfg = SwarmConfig(population_size=s, max_iterations=iters, rng_seed=1)
optimize(tasks, vms, SwarmConfig(population_size=s, max_iterations=2, rng_seed=1))
t0 = time.perf_counter()
res = optimize(tasks, vms, cfg)
print(json.dumps({"backend": BACKEND, "seconds": time.perf_counter() - t0, "fitness": res.fitness}))
"""


def kernel_inputs(s, c, v, seed=0):
    rng = np.random.default_rng(seed)
    assign = rng.integers(0, v, (s, c))
    masses = rng.random(s)
    masses /= masses.sum()
    return {
        "gravity": (assign, masses, 0.5, 1e-10, rng.random((s, s, 2, c)), v),
        "repair": (rng.random((s, v, c)) < 0.4, rng.random((s, v, c))),
        "makespan": (assign, rng.uniform(500, 2000, c), np.full(v, 256.0)),
    }


def time_kernels(s, c, v, repeat):
    args = kernel_inputs(s, c, v)
    names = {"gravity": "gravity_accelerations", "repair": "repair_onehot", "makespan": "makespans"}
    mods = {"numpy": _numpy}
    if _numba is not None:
        mods["numba"] = _numba
    rows = []
    for key, fn in names.items():
        row = {"kernel": fn}
        for label, mod in mods.items():
            f = getattr(mod, fn)
            f(*args[key])  # compile / warm
            timer = timeit.Timer(lambda: f(*args[key]))
            n, _ = timer.autorange()
            row[label] = min(timer.repeat(repeat, n)) / n
        rows.append(row)
    return rows


def time_end_to_end(s, c, v, iters):
    out = []
    for backend in ("numpy", "numba"):
        if backend == "numba" and _numba is None:
            continue
        env = dict(os.environ, SWARMSCHED_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, "-c", END_TO_END, str(s), str(c), str(v), str(iters)],
            env=env, capture_output=True, text=True, check=True,
        )
        out.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--swarm", type=int, default=50)
    ap.add_argument("--tasks", type=int, default=30)
    ap.add_argument("--vms", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"kernels at s={args.swarm}, c={args.tasks}, v={args.vms} (best of {args.repeat}, per call)")
    for row in time_kernels(args.swarm, args.tasks, args.vms, args.repeat):
        line = f"  {row['kernel']:<24} numpy {row['numpy'] * 1e6:10.1f} us"
        if "numba" in row:
            line += f"   numba {row['numba'] * 1e6:10.1f} us   x{row['numpy'] / row['numba']:.1f}"
        print(line)

    print(f"optimize() for {args.iterations} iterations, compile excluded")
    for r in time_end_to_end(args.swarm, args.tasks, args.vms, args.iterations):
        print(f"  {r['backend']:<6} {r['seconds']:8.3f} s   fitness {r['fitness']:.6g}")


if __name__ == "__main__":
    main()
