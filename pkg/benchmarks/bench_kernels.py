#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot loops (per-cell run lengths and the heartbeat fold) on
day-scale inputs plus a full scheduling scenario under each backend.

    python benchmarks/bench_kernels.py [--repeats 20]

The scenario comparison re-runs this script in a subprocess with
RIFLES_PURE_KERNELS=1, because the backend is chosen at import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(repeats):
    from rifles._kernels import pure

    try:
        from rifles._kernels import _corekern as compiled
    except ImportError:
        compiled = None

    rng = np.random.default_rng(0)
    cells = (rng.random((720, 100)) < 0.4).astype(np.uint8)

    num_beats = 20_000
    slots = np.sort(rng.integers(0, 720, num_beats)).astype(np.int64)
    clients = rng.integers(0, 100, num_beats).astype(np.int64)
    statuses = rng.integers(0, 2, num_beats).astype(np.uint8)
    windows = np.full(100, 5, dtype=np.int64)

    def fold(impl):
        grid = np.zeros((720, 100), dtype=np.uint8)
        impl.apply_heartbeats(grid, slots, clients, statuses, windows)
        return grid

    rows = []
    for name, impl in (("pure", pure), ("compiled", compiled)):
        if impl is None:
            rows.append((name, None, None))
            continue
        run_t = time_call(lambda: impl.run_lengths(cells), repeats)
        fold_t = time_call(lambda: fold(impl), repeats)
        rows.append((name, run_t, fold_t))

    print(f"{'backend':<10}{'run_lengths (720x100)':>24}{'heartbeat fold (20k)':>24}")
    base = rows[0]
    for name, run_t, fold_t in rows:
        if run_t is None:
            print(f"{name:<10}{'not built':>24}{'not built':>24}")
            continue
        line = f"{name:<10}{run_t * 1e3:>20.3f} ms{fold_t * 1e3:>21.3f} ms"
        if name != "pure" and base[1]:
            line += f"   (x{base[1] / run_t:.1f} / x{base[2] / fold_t:.1f} vs pure)"
        print(line)
    if compiled is not None:
        assert np.array_equal(compiled.run_lengths(cells), pure.run_lengths(cells))
        assert np.array_equal(fold(compiled), fold(pure))
        print("outputs bit-identical across backends")


def bench_scenario():
    from rifles import KERNEL_BACKEND
    from rifles.heartbeats import IngestConfig
    from rifles.policies import ScheduleConfig
    from rifles.simulator import SimulationOptions, run_scenario
    from rifles.tracegen import TraceConfig

    trace = TraceConfig(num_clients=100, num_days=7, slot_minutes=2)
    start = time.perf_counter()
    for seed in range(3):
        run_scenario(trace, IngestConfig(slot_minutes=2),
                     ScheduleConfig(selection_rate=0.1),
                     SimulationOptions(selection_rate=0.1), "gh", seed)
    elapsed = time.perf_counter() - start
    print(f"scenario (gh, 3 seeds, backend={KERNEL_BACKEND}): {elapsed:.2f}s")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--scenario-only", action="store_true",
                        help="internal: run just the scenario timing")
    args = parser.parse_args()

    if args.scenario_only:
        bench_scenario()
        return

    bench_kernels(args.repeats)
    bench_scenario()
    sys.stdout.flush()
    env = dict(os.environ, RIFLES_PURE_KERNELS="1")
    subprocess.run([sys.executable, __file__, "--scenario-only"],
                   env=env, check=True)


if __name__ == "__main__":
    main()
