"""Pure-Python counting kernels (reference implementation and fallback)."""
from __future__ import annotations

from itertools import product


def series_coeffs(parts, n):
    """Coefficients 0..n of 1 / prod(1 - z**a) for the parts ``a >= 1``."""
    if n < 0:
        return []
    c = [0] * (n + 1)
    c[0] = 1
    for a in parts:
        for k in range(a, n + 1):
            c[k] += c[k - a]
    return c


def count_solutions(columns, rhs):
    """Number of x >= 0 with sum_k x_k * columns[k] == rhs.

    Unbounded-knapsack DP over the box [0, rhs]; columns are nonnegative.
    """
    m = len(rhs)
    if any(b < 0 for b in rhs):
        return 0
    strides = [1] * m
    for i in range(m - 2, -1, -1):
        strides[i] = strides[i + 1] * (rhs[i + 1] + 1)
    size = strides[0] * (rhs[0] + 1) if m else 1
    cnt = [0] * size
    cnt[0] = 1
    for col in columns:
        if any(c > b for c, b in zip(col, rhs)):
            continue
        off = sum(c * s for c, s in zip(col, strides))
        for idx in product(*(range(c, b + 1) for c, b in zip(col, rhs))):
            f = sum(i * s for i, s in zip(idx, strides))
            cnt[f] += cnt[f - off]
    return cnt[size - 1]
