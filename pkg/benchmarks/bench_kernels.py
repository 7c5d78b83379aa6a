"""Time the compiled and numpy pairwise kernel sums on the same inputs.

    python3 benchmarks/bench_kernels.py --sizes 500,2000,8000 --repeat 3
"""
import argparse
import time

import numpy as np

from riesz_ext import _accel


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,2000,8000", help="comma-separated source counts")
    ap.add_argument("--targets", type=int, default=256)
    ap.add_argument("--power", type=float, default=1.0, help="kernel |x-y|^-power")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not importable; only the numpy path is timed")
    rng = np.random.default_rng(args.seed)
    targets = rng.normal(size=(args.targets, 3)) * 0.3
    print(f"{'sources':>8} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8} {'max rel diff':>13}")
    for m in (int(s) for s in args.sizes.split(",")):
        sources = rng.normal(size=(m, 3))
        coeffs = rng.random(m)
        t_np, ref = best_time(lambda: _accel.riesz_sum_numpy(targets, sources, coeffs, args.power), args.repeat)
        if _accel.HAVE_NUMBA:
            _accel.riesz_sum_numba(targets[:2], sources[:2], coeffs[:2], args.power)  # compile outside the timing
            t_nb, got = best_time(lambda: _accel.riesz_sum_numba(targets, sources, coeffs, args.power), args.repeat)
            diff = float(np.max(np.abs(got - ref) / np.abs(ref)))
            print(f"{m:>8d} {t_np:>11.4f} {t_nb:>11.4f} {t_np / t_nb:>8.1f} {diff:>13.2e}")
        else:
            print(f"{m:>8d} {t_np:>11.4f} {'-':>11} {'-':>8} {'-':>13}")


if __name__ == "__main__":
    main()
