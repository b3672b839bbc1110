"""Brute-force ground truth: solution counting, interior counts, polytope conversion.

Nothing here uses the elimination engine; counts come from an unbounded
knapsack dynamic program over right-hand sides in the box ``[0, b]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import floor
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .arith import ResourceLimitError
from .engine import MatrixError, SystemMatrix

RHS_LIMIT = 10 ** 6
STATE_LIMIT = 5 * 10 ** 7


def _matrix(A) -> SystemMatrix:
    return A if isinstance(A, SystemMatrix) else SystemMatrix.of(A)


def brute_count(A, b: Sequence[int], rhs_limit: int = RHS_LIMIT, state_limit: int = STATE_LIMIT) -> int:
    """Number of ``x >= 0`` in ``Z^d`` with ``A x = b``; 0 for ``b`` outside the nonnegative span."""
    A = _matrix(A)
    b = [int(x) for x in b]
    if len(b) != A.m:
        raise MatrixError(f"rhs has {len(b)} entries, expected {A.m}")
    if any(x < 0 for x in b):
        return 0
    for row, x in zip(A.rows, b):
        if x and not any(row):
            return 0
    if any(x > rhs_limit for x in b):
        raise ResourceLimitError(f"rhs entry exceeds the limit {rhs_limit}")
    states = 1
    for x in b:
        states *= x + 1
    if states > state_limit:
        raise ResourceLimitError(f"{states} dynamic-programming states exceed the limit {state_limit}")
    return kernels.count_solutions(A.columns, b)


def brute_count_interior(A, b: Sequence[int], **limits) -> int:
    """Number of strictly positive solutions, computed as ``brute_count(A, b - r)``."""
    A = _matrix(A)
    return brute_count(A, [x - r for x, r in zip(b, A.row_sums)], **limits)


def enumerate_positive(A, b: Sequence[int]) -> int:
    """Strictly positive solutions by direct search (small cases only)."""
    A = _matrix(A)
    cols = A.columns
    b = [int(x) for x in b]

    def rec(k: int, rest: list[int]) -> int:
        if k == len(cols):
            return int(not any(rest))
        col = cols[k]
        bound = min((rest[i] // c for i, c in enumerate(col) if c), default=0)
        if k == len(cols) - 1:
            return int(bound >= 1 and all(r == bound * c for r, c in zip(rest, col)))
        total = 0
        for x in range(1, bound + 1):
            total += rec(k + 1, [r - x * c for r, c in zip(rest, col)])
        return total

    if any(x < 0 for x in b):
        return 0
    return rec(0, b)


@dataclass(frozen=True)
class StandardFormSystem:
    """``{x : rows x <= rhs}`` rewritten as ``A (x, s) = rhs`` with slacks ``s >= 0``.

    ``translation`` is the integer shift ``x = y + translation`` that moved the
    polytope into the nonnegative orthant; for dilates the shift scales with ``t``.
    """

    matrix: SystemMatrix
    rhs: tuple[int, ...]
    slack_columns: tuple[int, ...]
    translation: tuple[int, ...]
    dimension: int

    def count(self, t: int = 1) -> int:
        return brute_count(self.matrix, [t * x for x in self.rhs])

    def count_interior(self, t: int = 1) -> int:
        return brute_count_interior(self.matrix, [t * x for x in self.rhs])


def _lp_extreme(rows, rhs, n, direction, nonneg):
    res = linprog(direction, A_ub=np.array(rows, dtype=float), b_ub=np.array(rhs, dtype=float),
                  bounds=[(0, None) if nonneg else (None, None)] * n, method="highs")
    if res.status == 3:
        return None
    if res.status != 0:
        raise ValueError("polytope is empty")
    return res.fun


def polytope_to_standard_form(inequalities: Sequence[tuple[Sequence[int], int]],
                              nonnegativity: bool = True, check_bounded: bool = True
                              ) -> StandardFormSystem:
    """Slack-variable form of ``{x : a . x <= b for each (a, b)}`` (plus ``x >= 0`` by default).

    The polytope is translated by an integer vector into the orthant when
    needed; inequalities that still carry negative coefficients must be
    redundant there and are dropped, otherwise :class:`ValueError` is raised.
    """
    if not inequalities:
        raise ValueError("no inequalities")
    n = len(inequalities[0][0])
    rows = [[int(x) for x in a] for a, _ in inequalities]
    rhs = [int(b) for _, b in inequalities]
    if any(len(r) != n for r in rows):
        raise ValueError("inequalities have different lengths")
    if check_bounded or not nonnegativity:
        for j in range(n):
            for sign in (1, -1):
                if nonnegativity and sign == 1:
                    continue
                e = [0.0] * n
                e[j] = float(sign)
                if _lp_extreme(rows, rhs, n, e, nonnegativity) is None:
                    raise ValueError(f"polytope is unbounded in coordinate {j + 1}")
    shift = [0] * n
    if not nonnegativity:
        for j in range(n):
            e = [0.0] * n
            e[j] = 1.0
            shift[j] = floor(_lp_extreme(rows, rhs, n, e, False) + 1e-9)
    rhs = [b - sum(a * s for a, s in zip(r, shift)) for r, b in zip(rows, rhs)]
    keep_rows, keep_rhs = [], []
    for i, (r, b) in enumerate(zip(rows, rhs)):
        if not any(r):
            if b < 0:
                raise ValueError("polytope is empty")
            continue
        if any(x < 0 for x in r):
            others = [rows[k] for k in range(len(rows)) if k != i]
            other_rhs = [rhs[k] for k in range(len(rows)) if k != i]
            best = _lp_extreme(others, other_rhs, n, [-float(x) for x in r], True) if others else None
            if best is None or -best > b + 1e-9:
                raise ValueError(f"inequality {i + 1} keeps a negative coefficient after translation")
            continue
        keep_rows.append(r)
        keep_rhs.append(b)
    k = len(keep_rows)
    full = [r + [1 if j == i else 0 for j in range(k)] for i, r in enumerate(keep_rows)]
    return StandardFormSystem(SystemMatrix.of(full), tuple(keep_rhs), tuple(range(n, n + k)),
                              tuple(shift), n)


def count_polytope_points(inequalities, t: int = 1, nonnegativity: bool = True) -> int:
    """Lattice points of ``t P`` by enumerating the bounding box (independent of the slack form)."""
    n = len(inequalities[0][0])
    rows = [[Fraction(x) for x in a] for a, _ in inequalities]
    rhs = [Fraction(b) * t for _, b in inequalities]
    lo, hi = [], []
    for j in range(n):
        e = [0.0] * n
        e[j] = 1.0
        lo.append(floor(_lp_extreme(rows, rhs, n, e, nonnegativity) - 1e-9))
        e[j] = -1.0
        hi.append(floor(-_lp_extreme(rows, rhs, n, e, nonnegativity) + 1e-9))
    total = 0
    for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if nonnegativity and any(v < 0 for v in x):
            continue
        if all(sum(a * v for a, v in zip(r, x)) <= b for r, b in zip(rows, rhs)):
            total += 1
    return total


__all__ = ["RHS_LIMIT", "STATE_LIMIT", "StandardFormSystem", "brute_count", "brute_count_interior",
           "count_polytope_points", "enumerate_positive", "polytope_to_standard_form"]
