#!/usr/bin/env python3
"""Benchmark the compiled walk kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--quick]

Covers the three hot paths: single-diagram exact evolution, batched
diagram-averaged exact evolution, and Monte Carlo trajectory batches.
Both backends consume identical inputs, so outputs are asserted equal
before timings are reported.
"""

import argparse
import time

import numpy as np

from wnrqc.architectures import gen_complete_graph, gen_ring1d
from wnrqc.kernels import implementations
from wnrqc.walk_exact import initial_vector, popcounts


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    scale = 10 if args.quick else 1

    impls = implementations()
    if len(impls) < 2:
        print("compiled kernels unavailable; nothing to compare")
        return

    rows = []

    n, depth = 14, 40
    d = gen_ring1d(n, depth)
    pi = np.ascontiguousarray(d.gates[:, 0])
    pj = np.ascontiguousarray(d.gates[:, 1])
    init = initial_vector(n, 2).probs

    def run_walk(impl):
        probs = init.copy()
        impl.walk_run(probs, pi, pj, 2, 0.01)
        return probs

    times = {}
    outs = {}
    for name, impl in impls.items():
        times[name], outs[name] = timeit(lambda impl=impl: run_walk(impl))
    assert np.array_equal(outs["python"], outs["cython"])
    rows.append((f"walk_run n={n} gates={d.s}", times))

    n, s, ndiag = 8, 20, 20000 // scale
    rng = np.random.default_rng(0)
    from wnrqc.architectures import sample_pairs
    i, j = sample_pairs(n, ndiag * s, rng)
    pi2 = np.ascontiguousarray(i.reshape(ndiag, s), dtype=np.int32)
    pj2 = np.ascontiguousarray(j.reshape(ndiag, s), dtype=np.int32)
    init8 = initial_vector(n, 2).probs
    weights = np.float_power(2.0, popcounts(n)) - 1.0
    times = {}
    for name, impl in impls.items():
        times[name], outs[name] = timeit(
            lambda impl=impl: impl.walk_zm1_batch(init8, weights, pi2, pj2, 2, 0.05),
            repeats=2)
    assert np.array_equal(outs["python"], outs["cython"])
    rows.append((f"walk_zm1_batch n={n} s={s} diagrams={ndiag}", times))

    n, s, batch = 12, 100, 200000 // scale
    d = gen_complete_graph(n, s, seed=1)
    pi = np.ascontiguousarray(d.gates[:, 0])
    pj = np.ascontiguousarray(d.gates[:, 1])
    uniforms = np.random.default_rng(2).random((batch, n + 3 * s))
    times = {}
    for name, impl in impls.items():
        times[name], outs[name] = timeit(
            lambda impl=impl: impl.mc_final_weights(n, 2, 0.01, pi, pj, uniforms),
            repeats=2)
    assert np.array_equal(outs["python"], outs["cython"])
    rows.append((f"mc_final_weights n={n} s={s} batch={batch}", times))

    uniforms5 = np.random.default_rng(3).random((batch, n + 5 * s))
    times = {}
    for name, impl in impls.items():
        times[name], outs[name] = timeit(
            lambda impl=impl: impl.mc_final_weights_resample(n, 2, 0.01, s, uniforms5),
            repeats=2)
    assert np.array_equal(outs["python"], outs["cython"])
    rows.append((f"mc_final_weights_resample n={n} s={s} batch={batch}", times))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'cython':>10}  {'speedup':>8}")
    for label, times in rows:
        speedup = times["python"] / times["cython"]
        print(f"{label:<{width}}  {times['python']*1e3:>8.1f}ms  "
              f"{times['cython']*1e3:>8.1f}ms  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
