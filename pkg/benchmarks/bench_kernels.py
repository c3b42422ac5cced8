"""Compare the compiled and numpy kernels on small complex matrices.

Run with ``python3 benchmarks/bench_kernels.py``.
"""
import argparse
import timeit

import numpy as np

from mquiver import _pykernels

try:
    from mquiver import _ckernels
except ImportError:
    _ckernels = None


def bench(impl, fn, n, number):
    rng = np.random.default_rng(n)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    roots = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if fn == "char_poly":
        call = lambda: impl.char_poly(m)  # noqa: E731
    else:
        call = lambda: impl.linear_factor_product(m, roots)  # noqa: E731
    return min(timeit.repeat(call, number=number, repeat=5)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="2,3,4,5,6,8")
    parser.add_argument("--number", type=int, default=2000)
    args = parser.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    if _ckernels is None:
        print("compiled extension not built; only the numpy backend is timed")
    print(f"{'kernel':<22}{'n':>3}{'numpy (us)':>13}{'cython (us)':>13}{'speedup':>9}")
    for fn in ("char_poly", "linear_factor_product"):
        for n in sizes:
            py = bench(_pykernels, fn, n, args.number) * 1e6
            if _ckernels is None:
                print(f"{fn:<22}{n:>3}{py:>13.2f}{'-':>13}{'-':>9}")
                continue
            cy = bench(_ckernels, fn, n, args.number) * 1e6
            print(f"{fn:<22}{n:>3}{py:>13.2f}{cy:>13.2f}{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
