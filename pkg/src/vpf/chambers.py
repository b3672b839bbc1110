"""Chamber assembly: from guarded leaves to a piecewise quasi-polynomial.

Every leaf is switched on or off by sign atoms ``form(b) < off_min``.  Deep
inside an open cell of the arrangement formed by the atoms' linear parts the
switches are constant, so the sum of the active leaves is a single
quasi-polynomial there.  Agreeing with the vector partition function on a
full-dimensional cone, it is that chamber's quasi-polynomial and holds on the
whole closed cell.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .arith import AffineForm, Poly, ResourceLimitError, lcm
from .engine import Dilation, SymbolicB, SystemMatrix, run_elimination
from .final import FinalLeaf, LeafSum, finalize, qp_from_samples
from .quasipoly import GE0, CaseConstraint, Piece, PiecewiseQP, QuasiPolynomial

log = logging.getLogger(__name__)

_EPS = 1e-9


class GeometryError(RuntimeError):
    """The floating-point cell search disagreed with an exact check."""


def _primitive(vec: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """``(h, s)`` with ``vec = c * s * h``, ``c > 0``, ``h`` primitive with first nonzero entry positive."""
    den = lcm(*(Fraction(v).denominator for v in vec))
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    s = 1 if lead > 0 else -1
    return tuple(s * x for x in ints), s


def _nullvector(rows: Sequence[Sequence[int]], k: int) -> tuple[int, ...] | None:
    """A primitive integer vector orthogonal to ``rows`` (rank ``k - 1``), else None."""
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        piv = mat[r][c]
        mat[r] = [x / piv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(k) if c not in pivots]
    if len(free) != 1:
        return None
    v = [Fraction(0)] * k
    v[free[0]] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -mat[i][free[0]]
    return _primitive(v)[0]


def cone_facets(columns: Sequence[Sequence[int]], k: int) -> list[tuple[int, ...]]:
    """Inner facet normals ``n`` (``n . a >= 0`` for every column) of the full-dimensional cone."""
    if k == 1:
        return [(1,)]
    out = set()
    distinct = sorted(set(tuple(c) for c in columns))
    for sub in combinations(distinct, k - 1):
        n = _nullvector(sub, k)
        if n is None:
            continue
        vals = [sum(x * y for x, y in zip(n, a)) for a in distinct]
        if all(v >= 0 for v in vals):
            out.add(n)
        elif all(v <= 0 for v in vals):
            out.add(tuple(-x for x in n))
    return sorted(out)


@dataclass(frozen=True)
class Cell:
    """Open cell of the guard arrangement inside the cone of ``A``."""

    signs: tuple[int, ...]
    point: tuple[Fraction, ...]


class _CellFinder:
    def __init__(self, columns: Sequence[Sequence[int]], k: int, hyperplanes: Sequence[tuple[int, ...]]):
        self.cols = np.array(columns, dtype=float).T.reshape(k, -1)
        self.columns = [tuple(c) for c in columns]
        self.k = k
        self.H = list(hyperplanes)
        self.lp_calls = 0

    def interior_point(self, decided: Sequence[tuple[int, int]]):
        """Exact point with ``s * h . b > 0`` for the decided hyperplanes, strictly inside the cone."""
        d = self.cols.shape[1]
        rows = []
        for j, s in decided:
            h = np.array(self.H[j], dtype=float)
            rows.append(np.append(-s * (h @ self.cols) / np.linalg.norm(h), 1.0))
        for i in range(d):
            r = np.zeros(d + 1)
            r[i] = -1.0
            r[-1] = 1.0
            rows.append(r)
        c = np.zeros(d + 1)
        c[-1] = -1.0
        self.lp_calls += 1
        res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(len(rows)),
                      A_eq=np.append(np.ones(d), 0.0).reshape(1, -1), b_eq=[1.0],
                      bounds=[(0, None)] * d + [(None, 1.0)], method="highs")
        if res.status != 0 or -res.fun <= _EPS:
            return None
        lam = [Fraction(float(x)).limit_denominator(10 ** 9) for x in res.x[:d]]
        point = tuple(sum((l * col[i] for l, col in zip(lam, self.columns)), Fraction(0))
                      for i in range(self.k))
        for j, s in decided:
            if s * sum(h * x for h, x in zip(self.H[j], point)) <= 0:
                raise GeometryError(f"LP interior point fails hyperplane {self.H[j]} exactly")
        return point

    def cells(self) -> list[Cell]:
        start = self.interior_point([])
        if start is None:
            raise GeometryError("cone of the matrix has empty interior")
        cells = [((), start)]
        for j, h in enumerate(self.H):
            nxt = []
            for signs, pt in cells:
                decided = list(enumerate(signs))
                v = sum(x * y for x, y in zip(h, pt))
                todo = (1, -1) if v == 0 else (-1 if v > 0 else 1,)
                if v != 0:
                    nxt.append((signs + (1 if v > 0 else -1,), pt))
                for s in todo:
                    p2 = self.interior_point(decided + [(j, s)])
                    if p2 is not None:
                        nxt.append((signs + (s,), p2))
            cells = nxt
        return [Cell(s, p) for s, p in sorted(cells)]

    def facet_meets_cell(self, normal: tuple[int, ...], cell: Cell) -> bool:
        """Is the cone facet with inner normal ``normal`` a facet of the closed cell?"""
        if self.k == 1:
            return True
        on = [a for a in self.columns if sum(x * y for x, y in zip(normal, a)) == 0]
        if not on:
            return False
        cols = np.array(on, dtype=float).T
        d = cols.shape[1]
        rows = []
        for h, s in zip(self.H, cell.signs):
            if _primitive(h)[0] == _primitive(normal)[0]:
                continue
            hv = np.array(h, dtype=float)
            rows.append(np.append(-s * (hv @ cols) / np.linalg.norm(hv), 1.0))
        for i in range(d):
            r = np.zeros(d + 1)
            r[i] = -1.0
            r[-1] = 1.0
            rows.append(r)
        c = np.zeros(d + 1)
        c[-1] = -1.0
        self.lp_calls += 1
        res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(len(rows)),
                      A_eq=np.append(np.ones(d), 0.0).reshape(1, -1), b_eq=[1.0],
                      bounds=[(0, None)] * d + [(None, 1.0)], method="highs")
        return res.status == 0 and -res.fun > _EPS


def _requirements(leaf: FinalLeaf, index: dict) -> frozenset | None:
    """``{(hyperplane, sign)}`` under which the leaf is on deep inside a cell; None if never."""
    req = set()
    for atom in leaf.signs:
        if atom.form.is_constant():
            if not atom.form.constant < atom.off_min:
                return None
            continue
        h, s = _primitive(atom.form.coeffs)
        j = index.setdefault(h, len(index))
        # form = c * s * h with c > 0 is eventually negative where s * (h . b) < 0
        req.add((j, -s))
    if any((j, -s) in req for j, s in req):
        return None
    return frozenset(req)


def _embed(n: int, rows: Sequence[int]) -> list[AffineForm]:
    return [AffineForm.param(n, r) for r in rows]


def _relation_constraints(el, m: int) -> list[CaseConstraint]:
    out = []
    for j, combo in sorted(el.relations.items()):
        den = lcm(*(Fraction(c).denominator for c in combo.values()))
        coeffs = [0] * m
        coeffs[j] = den
        for i, c in combo.items():
            coeffs[i] -= int(Fraction(c) * den)
        out.append(CaseConstraint(GE0, tuple(coeffs), 0))
        out.append(CaseConstraint(GE0, tuple(-x for x in coeffs), 0))
    return out


def _as_quasipolynomial(ls: LeafSum, max_rows: int, max_work: int) -> QuasiPolynomial | LeafSum:
    if ls.is_zero():
        return QuasiPolynomial.zero(ls.params)
    try:
        return ls.explicit(max_rows=max_rows, max_work=max_work)
    except ResourceLimitError:
        return ls


def symbolic(A: SystemMatrix | Sequence[Sequence[int]], order: str = "auto",
             max_rows: int = 20000, max_work: int = 400000) -> PiecewiseQP:
    """Piecewise quasi-polynomial for ``phi_A`` over the closed chambers it finds.

    Pieces whose residue table stays within ``max_rows`` classes (and
    ``max_work`` leaf-table products) are explicit :class:`QuasiPolynomial`
    objects; larger ones stay as :class:`LeafSum`.
    """
    A = A if isinstance(A, SystemMatrix) else SystemMatrix.of(A)
    el = run_elimination(A, SymbolicB(), order=order)
    leaves = finalize(el)
    k = len(el.rows)
    m = A.m
    params = el.parameter_names
    index: dict = {}
    keys: dict = {}
    shapes: list = []
    groups: dict = {}
    for leaf in leaves:
        req = _requirements(leaf, index)
        if req is None:
            continue
        key = (leaf.argument, leaf.factors, leaf.congruences)
        if key not in keys:
            keys[key] = len(shapes)
            shapes.append(FinalLeaf(leaf.coefficient, key[0], key[1], (), key[2]))
        i = keys[key]
        group = groups.setdefault(req, {})
        group[i] = group[i] + leaf.coefficient if i in group else leaf.coefficient
    H = sorted(index, key=index.get)
    sub_columns = [tuple(A.rows[i][c] for i in el.rows) for c in range(A.d)]
    finder = _CellFinder(sub_columns, k, H)
    cells = finder.cells()
    facets = cone_facets(sub_columns, k)
    by_signs = {c.signs: c for c in cells}
    embed = None if tuple(el.rows) == tuple(range(m)) else _embed(m, el.rows)
    extra = _relation_constraints(el, m)

    def lift(vec):
        if embed is None:
            return tuple(vec)
        out = [0] * m
        for i, r in enumerate(el.rows):
            out[r] = vec[i]
        return tuple(out)

    pieces = []
    for cell in cells:
        coeffs: dict = {}
        for req, group in groups.items():
            if all(cell.signs[j] == s for j, s in req):
                for i, c in group.items():
                    coeffs[i] = coeffs[i] + c if i in coeffs else c
        active = [FinalLeaf(c, shapes[i].argument, shapes[i].factors, (), shapes[i].congruences)
                  for i, c in sorted(coeffs.items()) if not c.is_zero()]
        if embed is not None:
            ls = LeafSum(params, [x for x in (leaf.compose(embed) for leaf in active) if x is not None])
        else:
            ls = LeafSum(params, active, merge=False)
        if ls.is_zero():
            continue
        cons = []
        for j, s in enumerate(cell.signs):
            flipped = cell.signs[:j] + (-s,) + cell.signs[j + 1:]
            if flipped in by_signs:
                cons.append(CaseConstraint(GE0, lift(tuple(s * x for x in H[j]))))
        for f in facets:
            if finder.facet_meets_cell(f, cell):
                cons.append(CaseConstraint(GE0, lift(f)))
        cons = sorted(set(cons + extra))
        pieces.append(Piece(tuple(cons), _as_quasipolynomial(ls, max_rows, max_work)))
    pieces.sort(key=lambda p: p.constraints)
    meta = {"order": [i + 1 for i in el.order], "kept": el.last + 1, "leaves": len(leaves),
            "cells": len(cells), "lp_calls": finder.lp_calls, "rank": A.rank}
    log.debug("symbolic: %d leaves, %d cells, %d pieces", len(leaves), len(cells), len(pieces))
    return PiecewiseQP(params, pieces, A.rows, meta)


def ehrhart(A: SystemMatrix | Sequence[Sequence[int]], rhs: Sequence[int], order: str = "auto",
            max_rows: int = 200000) -> QuasiPolynomial:
    """``t -> phi_A(t * rhs)`` as a quasi-polynomial valid for every ``t >= 0``."""
    A = A if isinstance(A, SystemMatrix) else SystemMatrix.of(A)
    rhs = tuple(int(x) for x in rhs)
    if any(x < 0 for x in rhs):
        raise ValueError("Ehrhart dilation needs a nonnegative right-hand side")
    if not any(rhs):
        return QuasiPolynomial.polynomial(("t",), Poly.const(1, 1))
    el = run_elimination(A, Dilation(rhs), order=order)
    active = []
    for leaf in finalize(el):
        ok = True
        for atom in leaf.signs:
            c = atom.form.coeffs[0]
            if c > 0 or (c == 0 and not atom.form.constant < atom.off_min):
                ok = False
                break
        if ok:
            active.append(leaf)
    ls = LeafSum(("t",), active)
    if ls.is_zero():
        return QuasiPolynomial.zero(("t",))
    try:
        return ls.explicit(max_rows=max_rows, max_work=20 * max_rows)
    except ResourceLimitError:
        pass
    period = ls.period[0]
    deg = max(ls.degree, 0)
    if period * (deg + 2) > 50 * max_rows:
        raise ResourceLimitError(f"Ehrhart period {period} is too large to tabulate")
    samples = {t: ls((t,)) for t in range(period * (deg + 2))}
    return qp_from_samples(samples, deg, period, "t").minimize()


__all__ = ["Cell", "GeometryError", "cone_facets", "ehrhart", "symbolic"]
