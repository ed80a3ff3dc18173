"""Compare the numba and numpy kernels used by the spectral module.

    python3 benchmarks/bench_kernels.py [--sizes 4 8 16 32] [--repeat 200]
"""
import argparse
import time

import numpy as np

from trainpoly import _kernels


def timed(fn, *args, repeat):
    fn(*args)  # warm-up, includes compilation
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn(*args)
    return (time.perf_counter() - t0) / repeat, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"compiled backend: {_kernels.BACKEND}")
    print(f"{'m':>4} {'kernel':>16} {'numpy [us]':>12} {'active [us]':>12} {'|dE|':>10}")
    for m in args.sizes:
        n_arcs = 3 * m * m
        src = rng.integers(0, m, n_arcs)
        tgt = rng.integers(0, m, n_arcs)
        logw = rng.normal(size=n_arcs)
        t_np, (M, _) = timed(_kernels.numpy_weighted_matrix, src, tgt, logw, m, repeat=args.repeat)
        t_fast, _ = timed(_kernels.weighted_matrix, src, tgt, logw, m, repeat=args.repeat)
        print(f"{m:>4} {'weighted_matrix':>16} {t_np * 1e6:12.1f} {t_fast * 1e6:12.1f} {'':>10}")
        M = M + 1e-3  # keep it primitive
        t_np, r_np = timed(_kernels.numpy_power_iteration, M, 1e-12, 10**6, repeat=args.repeat)
        t_fast, r_fast = timed(_kernels.power_iteration, M, 1e-12, 10**6, repeat=args.repeat)
        print(f"{m:>4} {'power_iteration':>16} {t_np * 1e6:12.1f} {t_fast * 1e6:12.1f} "
              f"{abs(r_np[0] - r_fast[0]):10.2e}")


if __name__ == "__main__":
    main()
