"""Timing comparison of the two split-scan kernels.

Runs the exhaustive split scan on sorted feature vectors of growing size
and reports per-call time for the compiled kernel and the numpy fallback,
verifying on the way that both return identical results. Invoke as

    python3 benchmarks/bench_kernels.py [--sizes 100,1000,10000] [--repeats 200]
"""

import argparse
import time

import numpy as np

from overlaptree import impurity
from overlaptree.kernels import CRITERION_IDS, scan_split_cython, scan_split_python


def make_case(n, seed):
    gen = np.random.default_rng(seed)
    values = np.sort(gen.integers(0, max(8, n // 10), n).astype(np.float64))
    labels = gen.integers(0, 2, n).astype(np.int8)
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    return values, labels


def time_kernel(kernel, values, labels, criterion_id, parent, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = kernel(values, labels, 1, criterion_id, parent)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,1000,10000,100000")
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if scan_split_cython is None:
        print("compiled kernel not built; timing the numpy fallback only")

    header = f"{'n':>8}  {'criterion':>9}  {'numpy (us)':>12}  {'cython (us)':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        values, labels = make_case(n, seed=n)
        n1 = int(labels.sum())
        for name, cid in CRITERION_IDS.items():
            parent = impurity(name, len(labels) - n1, n1)
            t_py, r_py = time_kernel(
                scan_split_python, values, labels, cid, parent, args.repeats
            )
            if scan_split_cython is None:
                print(f"{n:>8}  {name:>9}  {t_py * 1e6:>12.2f}  {'-':>12}  {'-':>8}")
                continue
            t_cy, r_cy = time_kernel(
                scan_split_cython, values, labels, cid, parent, args.repeats
            )
            if r_py != r_cy:
                raise SystemExit(f"kernel disagreement at n={n} {name}: {r_py} vs {r_cy}")
            print(
                f"{n:>8}  {name:>9}  {t_py * 1e6:>12.2f}  {t_cy * 1e6:>12.2f}"
                f"  {t_py / t_cy:>7.1f}x"
            )


if __name__ == "__main__":
    main()
