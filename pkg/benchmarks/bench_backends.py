#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure numpy fallback.

Runs each hot kernel on a representative workload under both backends and
prints per-kernel medians plus speedups.  The jitted functions are warmed
(compiled) before timing.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import statistics
import time

import numpy as np

from scoreclass import _kernels_nb as NB
from scoreclass import _kernels_np as NP


def make_instance(rng, n, num_classes):
    costs = rng.integers(1, 20, n).astype(np.float64)
    probs = rng.uniform(0.05, 0.95, n)
    weights = np.ones(n, dtype=np.int64)
    interior = np.sort(rng.choice(np.arange(1, n + 1), size=num_classes - 1,
                                  replace=False))
    cuts = np.concatenate([[0], interior, [n + 1]]).astype(np.int64)
    idx1 = np.array(sorted(range(n), key=lambda i: (costs[i] / probs[i], i)),
                    dtype=np.int64)
    idx0 = np.array(sorted(range(n), key=lambda i: (costs[i] / (1 - probs[i]), i)),
                    dtype=np.int64)
    return costs, probs, weights, cuts, idx1, idx0


def workloads(rng):
    c12, p12, w12, cuts12, i1_12, i0_12 = make_instance(rng, 12, 4)
    c10, p10, w10, cuts10, i1_10, i0_10 = make_instance(rng, 10, 4)
    c9, p9, w9, cuts9, _, _ = make_instance(rng, 9, 3)
    c7, p7, _, _, _, _ = make_instance(rng, 7, 3)
    kofn_cuts = np.array([0, 6, 13], dtype=np.int64)
    target = np.zeros(11)
    target[cuts10[1]:cuts10[2]] = 1.0
    return [
        ("adaptive_dp (n=12, B=4)",
         lambda K: K.adaptive_dp(c12, p12, w12, cuts12)),
        ("nonadaptive_dp (n=9, B=3)",
         lambda K: K.nonadaptive_dp(c9, p9, w9, cuts9)),
        ("kofn_cost_blocks (n=12, k=6)",
         lambda K: K.kofn_cost_blocks(c12, p12, kofn_cuts, 6, i1_12, i0_12)),
        ("bminus1_enum (n=10, B=4)",
         lambda K: K.bminus1_enum(c10, p10, cuts10, i1_10, i0_10)),
        ("verification_dp (n=10)",
         lambda K: K.verification_dp(c10, p10, w10, cuts10, target,
                                     int(cuts10[1]), int(cuts10[2]) - 1, 0)),
        ("block_cost_min_over_perms (n=7)",
         lambda K: K.block_cost_min_over_perms(c7, p7, 3, 5, 1)),
    ]


def bench(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed runs per kernel (median reported)")
    args = parser.parse_args()

    rng = np.random.default_rng(2024)
    cases = workloads(rng)
    for _, call in cases:  # warm the jit compiler outside the timers
        call(NB)

    width = max(len(name) for name, _ in cases)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, call in cases:
        t_np = bench(lambda: call(NP), args.repeats)
        t_nb = bench(lambda: call(NB), args.repeats)
        print(f"{name:<{width}}  {t_np * 1e3:>8.2f}ms  {t_nb * 1e3:>8.2f}ms  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
