"""Time the compiled and numpy window-moment kernels on random image pairs.

Usage: python benchmarks/bench_local_stats.py [--sizes 64 128 256] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from ssimlab import gaussian_kernel
from ssimlab._backend import compiled_window_moments, python_window_moments


def best_of(fn, repeat: int) -> float:
    t = timeit.Timer(fn)
    n, _ = t.autorange()
    return min(t.repeat(repeat=repeat, number=n)) / n


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    w = gaussian_kernel(11, 1.5).weights
    rng = np.random.default_rng(0)
    print(f"{'size':>6} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8} {'identical':>9}")
    for n in args.sizes:
        a, b = rng.random((n, n)), rng.random((n, n))
        t_py = best_of(lambda: python_window_moments(a, b, w), args.repeat)
        if compiled_window_moments is None:
            print(f"{n:>6} {t_py * 1e3:>10.3f} {'n/a':>10} {'n/a':>8} {'n/a':>9}")
            continue
        t_cy = best_of(lambda: compiled_window_moments(a, b, w), args.repeat)
        same = np.array_equal(python_window_moments(a, b, w), compiled_window_moments(a, b, w))
        print(f"{n:>6} {t_py * 1e3:>10.3f} {t_cy * 1e3:>10.3f} {t_py / t_cy:>7.2f}x {str(same):>9}")


if __name__ == "__main__":
    main()
