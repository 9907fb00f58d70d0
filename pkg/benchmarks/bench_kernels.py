"""Compiled kernels against their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--limit N] [--repeat R]

Both backends are timed in this process by calling the private kernels
directly, so the result does not depend on SEQLAB_DISABLE_NUMBA. The first
compiled call is excluded (warm-up) to report steady-state speed.
"""

import argparse
import itertools
import time

import numpy as np

from seqlab import kernels
from seqlab.certify import admissible_tuples


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_residues(limit, m, repeat):
    def run(kernel):
        res = np.zeros(limit + 1, dtype=np.uint8)
        res[1] = 1
        kernel(res, 2, limit + 1, m)
        return res

    a, b = run(kernels._extend_residues_numpy), run(kernels._extend_residues_loop)
    assert np.array_equal(a, b)
    return (best_of(lambda: run(kernels._extend_residues_loop), repeat),
            best_of(lambda: run(kernels._extend_residues_numpy), repeat))


def bench_search(x, m, j, repeat):
    dom = np.array(admissible_tuples(m, j).groups[0], dtype=np.int64)
    combos = list(itertools.product(dom.tolist(), repeat=1))
    prefixes = np.array(combos, dtype=np.int64).reshape(len(combos), 1)
    n = len(combos)

    def numpy_run():
        out = (np.full(n, kernels.INF_HITS), np.full((n, j), -1), np.zeros(n, dtype=np.int64))
        kernels._search_partitions_numpy(dom, prefixes, m, x, j, np.array([kernels.INF_HITS]),
                                         kernels.INF_HITS, *out)
        return int(out[0].min())

    def jit_run():
        e, _, _ = kernels.search_partitions(dom, prefixes, m, x, j,
                                            np.array([kernels.INF_HITS]), parallel=False)
        return int(e.min())

    assert numpy_run() == jit_run()
    return best_of(jit_run, repeat), best_of(numpy_run, repeat)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--limit", type=int, default=10_000_000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if not kernels.USE_NUMBA:
        raise SystemExit("numba is disabled (SEQLAB_DISABLE_NUMBA); nothing to compare")

    rows = [(f"residues mod 7 up to {args.limit:,}", *bench_residues(args.limit, 7, args.repeat))]
    for x, m, j in [(0, 5, 8), (0, 7, 7), (0, 3, 11)]:
        rows.append((f"search e_({x},{m},{j})", *bench_search(x, m, j, args.repeat)))

    print(f"{'kernel':34s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, jit_t, np_t in rows:
        print(f"{name:34s} {jit_t:10.4f} {np_t:10.4f} {np_t / jit_t:8.1f}x")


if __name__ == "__main__":
    main()
