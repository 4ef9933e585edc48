"""Timing of the per-subset EER / TPR kernel: numba loops vs pure numpy.

    python benchmarks/bench_kernels.py [--k 20] [--size 6000] [--repeat 5]

Both backends are imported from the same module, so the comparison does not
depend on SIGMABIAS_NO_NUMBA.  Results are also checked for bit equality.
"""

import argparse
import time

import numpy as np

from sigmabias import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--size", type=int, default=6000)
    ap.add_argument("--pool", type=int, default=50000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    gen = rng.normal(0.50, 0.10, args.pool)
    imp = rng.normal(0.09, 0.10, args.pool)
    gi = rng.integers(0, args.pool, (args.k, args.size))
    ii = rng.integers(0, args.pool, (args.k, args.size))

    if not K.HAVE_NUMBA:
        print("numba not installed; only the numpy backend is timed")
    print(f"K={args.k} subset size={args.size} pool={args.pool} (best of {args.repeat})")
    for name, code in (("EER", K.KIND_EER), ("TPR@FPR=0.01", K.KIND_TPR)):
        t_np, v_np = best_of(lambda: K.numpy_subset_performance(gen, imp, gi, ii, code, 0.01),
                             args.repeat)
        line = f"{name:>13}  numpy {t_np * 1e3:8.2f} ms"
        if K.HAVE_NUMBA:
            K.loop_subset_performance(gen, imp, gi[:1], ii[:1], code, 0.01)  # compile
            t_nb, v_nb = best_of(
                lambda: K.loop_subset_performance(gen, imp, gi, ii, code, 0.01), args.repeat)
            same = np.array_equal(v_np, v_nb)
            line += f"  numba {t_nb * 1e3:8.2f} ms  speed-up {t_np / t_nb:5.2f}x  identical={same}"
        print(line)


if __name__ == "__main__":
    main()
