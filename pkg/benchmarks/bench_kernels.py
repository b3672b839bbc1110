"""Compare the compiled counting kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``; both paths must agree on every case.
"""
import argparse
import timeit

from vpf import _pykernels, kernels

CASES = [
    ("count_solutions 2x4, b=(200,150)", "count_solutions",
     ([(1, 1), (2, 1), (1, 0), (0, 1)], [200, 150])),
    ("count_solutions 3x6, b=(40,40,40)", "count_solutions",
     ([(1, 1, 3), (0, 2, 4), (4, 1, 1), (3, 0, 4), (2, 1, 2), (3, 4, 3)], [40, 40, 40])),
    ("count_solutions 1x5, b=(20000,)", "count_solutions",
     ([(1,), (2,), (3,), (5,), (7,)], [20000])),
    ("series_coeffs parts 1..6, n=20000", "series_coeffs", ([1, 2, 3, 4, 5, 6], 20000)),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not kernels.HAVE_EXTENSION:
        print("compiled extension not available; build with: pip install -e . --no-build-isolation")
        return
    from vpf import _ckernels

    print(f"{'case':<38} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, fn, call_args in CASES:
        py, c = getattr(_pykernels, fn), getattr(_ckernels, fn)
        expected, got = py(*call_args), c(*call_args)
        if got is None:
            print(f"{name:<38} compiled kernel overflowed int64; skipped")
            continue
        assert list(expected) == list(got) if fn == "series_coeffs" else expected == got, name
        tp = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: c(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<38} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
