import os
import subprocess
import sys
from math import comb

import pytest

from vpf import _pykernels, kernels

SYSTEMS = [
    ([(1, 1), (2, 1), (1, 0), (0, 1)], [5, 4], 11),
    ([(1, 1), (2, 1), (1, 0), (0, 1)], [4, 1], 3),
    ([(1,), (1,)], [7], 8),
    ([(2,)], [7], 0),
]


@pytest.mark.parametrize("cols, rhs, expected", SYSTEMS)
def test_count_solutions(cols, rhs, expected):
    assert kernels.count_solutions(cols, rhs) == expected
    assert _pykernels.count_solutions(cols, rhs) == expected


def test_series_coeffs_agree():
    for parts in ([1, 1, 1], [1, 2], [3, 5, 7, 7]):
        assert list(kernels.series_coeffs(parts, 60)) == list(_pykernels.series_coeffs(parts, 60))
    assert list(kernels.series_coeffs([1, 1, 1], 10)) == [comb(n + 2, 2) for n in range(11)]


def test_int64_overflow_falls_back():
    big = kernels.series_coeffs([1] * 12, 3000)
    assert big[3000] == comb(3011, 11)


@pytest.mark.skipif(not kernels.HAVE_EXTENSION, reason="compiled extension not built")
def test_extension_agrees_with_python():
    from vpf import _ckernels
    cols = [(1, 2, 0), (0, 1, 1), (2, 0, 1), (1, 1, 1)]
    for rhs in ([6, 5, 4], [10, 3, 7], [0, 0, 0]):
        assert _ckernels.count_solutions(cols, rhs) == _pykernels.count_solutions(cols, rhs)


def test_pure_python_switch():
    env = dict(os.environ, VPF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from vpf import kernels; print(kernels.HAVE_EXTENSION, "
                          "kernels.count_solutions([(1, 1), (2, 1), (1, 0), (0, 1)], [5, 4]))"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "11"]
