"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Inputs come from the hex arrangement (N=4), whose graph has 1000 vertices.
"""
import argparse
import time

import numpy as np

from dualcube import cubing, walls2d
from dualcube.kernels import _numba, _numpy


def best_of(fn, repeat):
    fn()  # compile / warm caches
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    A = walls2d.arrangement_hex(4)
    G = cubing.enumerate_arrangement(A)
    P = A.pocset
    sides = 2 * np.arange(P.n_pairs) + G.bits.astype(np.int64)
    rel = np.ascontiguousarray(np.random.default_rng(0).random((120, 120)) < 0.02)
    sc = np.ascontiguousarray(A.side_coef, dtype=np.int64)
    small = cubing.enumerate_arrangement(walls2d.arrangement_hex(1)).bits
    return [
        ("transitive_closure 120", lambda k: k.transitive_closure(rel)),
        ("minimal_mask_batch V=1000", lambda k: k.minimal_mask_batch(P.lt, sides)),
        ("hamming_matrix 1000x1000", lambda k: k.hamming_matrix(G.bits, G.bits)),
        ("bfs_distances V=1000", lambda k: k.bfs_distances(G.indptr, G.indices, np.array([0]))),
        ("halfplanes_feasible_batch V=1000", lambda k: k.halfplanes_feasible_batch(sc, sides)),
        ("median_interval_violations V=64", lambda k: k.median_interval_violations(small)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, run in cases():
        a = best_of(lambda: run(_numpy), args.repeat)
        b = best_of(lambda: run(_numba), args.repeat)
        print(f"{name:36s} {a * 1e3:10.2f} {b * 1e3:10.2f} {a / b:8.1f}")


if __name__ == "__main__":
    main()
