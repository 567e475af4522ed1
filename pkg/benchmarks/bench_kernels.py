"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--rows 32768] [--m 30] [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from chernoffdp import _kernels_py
from chernoffdp._backend import BACKEND, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=1 << 15)
    ap.add_argument("--m", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    if BACKEND != "cython":
        print("compiled extension not available; only the fallback can be timed")
    u = np.random.default_rng(0).random((args.rows, args.m)) - 0.5
    count_args = (0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0)
    pair_args = (1, 0.5, 0.0, 1.0, 1.0, 1.5, -60.0, 61.0, [0.0, 1.0], 1e-10)

    cases = [
        (f"count_h1 {args.rows}x{args.m}", lambda k: k.count_h1(u, *count_args)),
        ("laplace_pair_integral C_0.5", lambda k: k.laplace_pair_integral(*pair_args)[0]),
    ]
    print(f"{'kernel':<32}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for name, call in cases:
        tp, vp = best_of(lambda: call(_kernels_py), args.repeat)
        if BACKEND == "cython":
            tc, vc = best_of(lambda: call(kernels), args.repeat)
            same = vc == vp if isinstance(vc, int) else math.isclose(vc, vp, abs_tol=1e-13)
            print(f"{name:<32}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x" + ("" if same else "  MISMATCH"))
        else:
            print(f"{name:<32}{'-':>12}{tp:>12.4f}{'-':>10}")


if __name__ == "__main__":
    main()
