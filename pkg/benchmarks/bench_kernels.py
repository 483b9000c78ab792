#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on identical inputs and reports the speedup:

* run_reps: the tester's sample-and-compare repetition loop,
* eval_points: batched function evaluation,
* violation_counts: full-table derivative sign counting,

plus an end-to-end accept-path tester run through whichever backend the
environment selected (set UNATE_PURE_NUMPY=1 to force the fallback).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from unate import _kernels
from unate import _kernels_numba, _kernels_numpy
from unate.oracles import gen_weighted_threshold
from unate.tester import build_schedule, unate_test


def time_call(fn, *args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_run_reps(repeats):
    n = 12
    rng = np.random.default_rng(0)
    table = rng.integers(-50, 50, size=1 << n, dtype=np.int64)
    # Monotone-ize so the loop never exits early: cumulative max along index.
    table = np.maximum.accumulate(table)
    reps, m = 4000, 24
    dims = rng.integers(0, n, size=reps, dtype=np.int64)
    points = rng.integers(0, 1 << n, size=(reps, m), dtype=np.uint64)
    empty = np.empty(0, dtype=np.int64)
    args = (0, n, 0, 0, 1, empty, table, dims, points)

    t_nb, out_nb = time_call(_kernels_numba.run_reps, *args, repeats=repeats)
    t_np, out_np = time_call(_kernels_numpy.run_reps, *args, repeats=repeats)
    assert out_nb[0] == out_np[0] and out_nb[1] == out_np[1]
    return "run_reps (4000 reps x 24 pts, n=12 table)", t_nb, t_np


def bench_eval_points(repeats):
    n = 40
    rng = np.random.default_rng(1)
    weights = rng.integers(1, 9, size=n, dtype=np.int64)
    xs = rng.integers(0, 1 << n, size=200_000, dtype=np.uint64)
    empty = np.empty(0, dtype=np.int64)
    args = (4, n, 0, 0, 1, weights, empty, xs)

    t_nb, out_nb = time_call(_kernels_numba.eval_points, *args, repeats=repeats)
    t_np, out_np = time_call(_kernels_numpy.eval_points, *args, repeats=repeats)
    assert np.array_equal(out_nb, out_np)
    return "eval_points (threshold, 200k points, n=40)", t_nb, t_np


def bench_violation_counts(repeats):
    n = 18
    rng = np.random.default_rng(2)
    table = rng.integers(0, 3, size=1 << n, dtype=np.int64)

    t_nb, out_nb = time_call(_kernels_numba.violation_counts, table, n, repeats=repeats)
    t_np, out_np = time_call(_kernels_numpy.violation_counts, table, n, repeats=repeats)
    assert np.array_equal(out_nb[0], out_np[0]) and np.array_equal(out_nb[1], out_np[1])
    return f"violation_counts (n={n} table)", t_nb, t_np


def bench_end_to_end(repeats):
    oracle = gen_weighted_threshold(12, seed=3)
    eps = "1/16"
    schedule = build_schedule(12, eps)

    def run():
        return unate_test(gen_weighted_threshold(12, seed=3), eps, 1)

    best, report = time_call(run, repeats=repeats)
    assert report.verdict == "accept"
    print(
        f"\nend-to-end unate_test (n=12, eps=1/16, {schedule.total_queries} queries) "
        f"via '{_kernels.BACKEND}' backend: {best * 1e3:.2f} ms"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rows = [
        bench_run_reps(args.repeats),
        bench_eval_points(args.repeats),
        bench_violation_counts(args.repeats),
    ]
    print(f"{'kernel':<50} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, t_nb, t_np in rows:
        print(f"{name:<50} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")

    bench_end_to_end(args.repeats)


if __name__ == "__main__":
    main()
