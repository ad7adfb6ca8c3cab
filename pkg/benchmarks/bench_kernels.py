"""Compare the numba and numpy flavours of every hot kernel.

Usage: python3 benchmarks/bench_kernels.py [--size N] [--repeat R]

Both flavours are imported side by side, so one process times both
regardless of DIRAC_REDUCE_BACKEND. The first numba call (compilation) is
excluded from the timings and reported separately.
"""
import argparse
import time
import timeit

import numpy as np

from dirac_reduce import _accel
from dirac_reduce.kernels import NUMBA_KERNELS, NUMPY_KERNELS


def _cases(n, rng):
    z = rng.uniform(-1, 1, n)
    f = rng.normal(size=(64, n))
    t = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    m = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    v = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
    a, d = rng.normal(size=n), rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    h = 0.01
    return {
        "jacobi": (6, 0.7, 1.3, z),
        "trapezoid": (f, h),
        "conjugate": (t, m),
        "apply": (m, v),
        "staggered": (a, d, w, h),
        "central": (a, d, w, h, 1.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200_000, help="points per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(0)
    cases = _cases(args.size, rng)
    print(f"size={args.size} repeat={args.repeat} threads={_accel.thread_cap() or 'default'}")
    print(f"{'kernel':<10} {'compile_s':>10} {'numba_ms':>10} {'numpy_ms':>10} {'speedup':>8}")
    for name, call_args in cases.items():
        nb, npy = NUMBA_KERNELS[name], NUMPY_KERNELS[name]
        t0 = time.perf_counter()
        nb(*call_args)
        compile_s = time.perf_counter() - t0
        t_nb = min(timeit.repeat(lambda: nb(*call_args), number=1, repeat=args.repeat))
        t_np = min(timeit.repeat(lambda: npy(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<10} {compile_s:>10.2f} {1e3 * t_nb:>10.2f} {1e3 * t_np:>10.2f} {t_np / t_nb:>8.2f}")


if __name__ == "__main__":
    main()
