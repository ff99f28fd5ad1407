"""Time the hot kernels on the compiled and pure-numpy paths.

Spawns one worker subprocess per path (the path is fixed at import time by
UAVCONTRACT_DISABLE_JIT, so it cannot be flipped in-process), times each
workload after a warmup, and prints a side-by-side table.  The training
workload must produce byte-identical trajectories on both paths; the
script fails loudly if it does not.

Usage: python3 benchmarks/jit_benchmark.py [--repeats N]
"""

import argparse
import hashlib
import json
import os
import statistics
import subprocess
import sys
import time


def build_workloads():
    import numpy as np
    import uavcontract as uc
    from uavcontract import _kernels

    scenario = uc.Scenario(
        types=(uc.UavType(index=1, c1=0.5, c2=0.0, t=1.0, n=5),),
        satisfaction_factor=6.0, deployment_cost=1.0, s_max=13.75,
        t_max=2.0, vdd_demand=800.0, total_uavs=5)
    params = uc.PhcParams(reward_levels=20, size_levels=20)

    def train_20k():
        result = uc.train(scenario, params, 20_000, None,
                          np.random.default_rng(0))
        return result

    grid2 = np.arange(1201) * 0.25
    grid3 = np.arange(201) * 0.1

    def oracle2():
        return _kernels.oracle_scan_2(grid2, 30.0, 30.0, 1.0, 0.5,
                                      5.0, 5.0, 1.0)

    def oracle3():
        return _kernels.oracle_scan_3(grid3, 30.0, 20.0, 10.0, 1.0, 0.5,
                                      0.25, 5.0, 5.0, 5.0, 1.0)

    rng = np.random.default_rng(1)
    m = 100_000
    batch = (rng.integers(0, 10, m), rng.integers(0, 20, m),
             rng.normal(scale=40.0, size=m), rng.integers(0, 10, m))

    def updates():
        tables = uc.PolicyTables.cold(10, 20)
        _kernels.update_many(tables.q, tables.pi, *batch, 0.7, 0.8, 0.01)
        return tables

    return {"train 20k slots": train_20k,
            "oracle scan, 2 types, 1201 grid": oracle2,
            "oracle scan, 3 types, 201 grid": oracle3,
            "100k table updates": updates}


def digest_train(result):
    log = result.log
    h = hashlib.sha256()
    for arr in (log.reward_index, log.size_index, log.uav_utility,
                log.gcs_term, result.gcs_tables[0].q,
                result.uav_tables[0].pi):
        h.update(arr.tobytes())
    return h.hexdigest()


def run_worker(repeats):
    from uavcontract import _kernels

    _kernels.warmup()
    workloads = build_workloads()
    timings = {}
    extras = {}
    for name, fn in workloads.items():
        fn()  # one untimed pass per workload
        samples = []
        for _ in range(repeats):
            tic = time.perf_counter()
            out = fn()
            samples.append(time.perf_counter() - tic)
        timings[name] = statistics.median(samples)
        if name.startswith("train"):
            extras["train_digest"] = digest_train(out)
        elif "2 types" in name:
            extras["oracle2"] = [int(i) for i in out]
        elif "3 types" in name:
            extras["oracle3"] = [int(i) for i in out]
    print(json.dumps({"jit_enabled": _kernels.JIT_ENABLED,
                      "timings": timings, **extras}))


def spawn(disable_jit, repeats):
    env = dict(os.environ)
    if disable_jit:
        env["UAVCONTRACT_DISABLE_JIT"] = "1"
    else:
        env.pop("UAVCONTRACT_DISABLE_JIT", None)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed passes per workload (median reported)")
    parser.add_argument("--worker", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        run_worker(args.repeats)
        return 0

    pure = spawn(True, args.repeats)
    jit = spawn(False, args.repeats)
    assert not pure["jit_enabled"]
    if not jit["jit_enabled"]:
        print("numba is not installed; both columns ran the pure path")

    width = max(len(n) for n in pure["timings"])
    print(f"{'workload':<{width}}  {'pure (s)':>10}  {'jit (s)':>10}  "
          f"{'speedup':>8}")
    for name in pure["timings"]:
        a = pure["timings"][name]
        b = jit["timings"][name]
        print(f"{name:<{width}}  {a:>10.4f}  {b:>10.4f}  {a / b:>7.1f}x")

    if pure["train_digest"] != jit["train_digest"]:
        print("ERROR: training trajectories differ between paths",
              file=sys.stderr)
        return 1
    print("training trajectories byte-identical across paths")
    for key in ("oracle2", "oracle3"):
        if pure[key] != jit[key]:
            print(f"ERROR: {key} picked different grid points: "
                  f"{pure[key]} vs {jit[key]}", file=sys.stderr)
            return 1
    print(f"oracle picks agree: {pure['oracle2']} and {pure['oracle3']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
