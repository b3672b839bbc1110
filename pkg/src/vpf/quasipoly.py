"""Quasi-polynomials and piecewise quasi-polynomials.

A :class:`QuasiPolynomial` stores one polynomial per residue class of the
parameters modulo a period vector.  Evaluation at negative arguments uses
floored residues, which is what makes ``q(-b - r)`` meaningful.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Mapping, Sequence

from .arith import AffineForm, Poly, lcm

SCHEMA_VERSION = "vpf-1"


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


class QuasiPolynomial:
    __slots__ = ("params", "period", "rows", "_min")

    def __init__(self, params: Sequence[str], period: Sequence[int],
                 rows: Mapping[tuple[int, ...], Poly] | None = None):
        self.params = tuple(params)
        self.period = tuple(int(p) for p in period)
        if len(self.period) != len(self.params) or any(p < 1 for p in self.period):
            raise ValueError(f"bad period {self.period} for parameters {self.params}")
        clean = {}
        for res, poly in (rows or {}).items():
            res = tuple(int(r) % p for r, p in zip(res, self.period))
            if poly.nvars != len(self.params):
                raise ValueError("row polynomial has the wrong number of variables")
            if res in clean:
                poly = clean[res] + poly
            if not poly.is_zero():
                clean[res] = poly
            elif res in clean:
                del clean[res]
        self.rows: dict[tuple[int, ...], Poly] = clean
        self._min = None

    # -- construction ------------------------------------------------------
    @classmethod
    def zero(cls, params: Sequence[str]) -> "QuasiPolynomial":
        return cls(params, (1,) * len(params))

    @classmethod
    def polynomial(cls, params: Sequence[str], poly: Poly) -> "QuasiPolynomial":
        return cls(params, (1,) * len(params), {(0,) * len(params): poly})

    @classmethod
    def from_coeffs(cls, params, period, coeffs: Mapping[tuple, Fraction]) -> "QuasiPolynomial":
        """From ``{(residue vector, exponent vector): rational}``."""
        rows: dict = {}
        for (res, exp), c in coeffs.items():
            rows.setdefault(tuple(res), {})[tuple(exp)] = Fraction(c)
        n = len(params)
        return cls(params, period, {r: Poly(n, t) for r, t in rows.items()})

    # -- inspection --------------------------------------------------------
    @property
    def nparams(self) -> int:
        return len(self.params)

    @property
    def coeffs(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
        return {(res, e): c for res, poly in self.rows.items() for e, c in poly.terms.items()}

    @property
    def degree(self) -> int:
        return max((p.degree for p in self.rows.values()), default=-1)

    def is_zero(self) -> bool:
        return not self.rows

    def is_polynomial(self) -> bool:
        return all(p == 1 for p in self.minimize().period)

    def residues(self):
        return product(*(range(p) for p in self.period))

    def row(self, res) -> Poly:
        return self.rows.get(tuple(res), Poly(self.nparams))

    def __call__(self, point: Sequence[int]) -> Fraction:
        return qp_eval(self, point)

    # -- algebra -----------------------------------------------------------
    def lift(self, period: Sequence[int]) -> "QuasiPolynomial":
        period = tuple(period)
        if period == self.period:
            return self
        for p, q in zip(self.period, period):
            if q % p:
                raise ValueError(f"cannot lift period {self.period} to {period}")
        rows = {}
        for res in product(*(range(p) for p in period)):
            src = tuple(r % p for r, p in zip(res, self.period))
            if src in self.rows:
                rows[res] = self.rows[src]
        return QuasiPolynomial(self.params, period, rows)

    def __add__(self, other: "QuasiPolynomial") -> "QuasiPolynomial":
        return qp_add(self, other)

    def __neg__(self) -> "QuasiPolynomial":
        return qp_scale(self, -1)

    def __sub__(self, other: "QuasiPolynomial") -> "QuasiPolynomial":
        return qp_add(self, qp_scale(other, -1))

    def minimize(self) -> "QuasiPolynomial":
        """Smallest period (componentwise) representing the same function."""
        if self._min is not None:
            return self._min
        q = self
        for i in range(q.nparams):
            for p in _divisors(q.period[i]):
                if p == q.period[i]:
                    break
                if all(q.row(res) == q.row(res[:i] + (res[i] % p,) + res[i + 1:])
                       for res in q.residues()):
                    period = q.period[:i] + (p,) + q.period[i + 1:]
                    q = QuasiPolynomial(q.params, period,
                                        {res: poly for res, poly in q.rows.items() if res[i] < p})
                    break
        q._min = q
        self._min = q
        return q

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiPolynomial) or self.params != other.params:
            return NotImplemented if not isinstance(other, QuasiPolynomial) else False
        period = tuple(lcm(a, b) for a, b in zip(self.period, other.period))
        return self.lift(period).rows == other.lift(period).rows

    def __hash__(self):
        m = self.minimize()
        return hash((m.params, m.period, frozenset(m.rows.items())))

    def __repr__(self) -> str:
        return f"QuasiPolynomial({render_qp(self)!r}, period={self.period})"


def qp_eval(qp: QuasiPolynomial, point: Sequence[int]) -> Fraction:
    if len(point) != qp.nparams:
        raise ValueError(f"point has {len(point)} coordinates, expected {qp.nparams}")
    res = tuple(int(x) % p for x, p in zip(point, qp.period))
    poly = qp.rows.get(res)
    return poly(point) if poly is not None else Fraction(0)


def _common(a: QuasiPolynomial, b: QuasiPolynomial):
    if a.params != b.params:
        raise ValueError(f"parameter mismatch: {a.params} vs {b.params}")
    period = tuple(lcm(x, y) for x, y in zip(a.period, b.period))
    return a.lift(period), b.lift(period), period


def qp_add(a: QuasiPolynomial, b: QuasiPolynomial) -> QuasiPolynomial:
    a, b, period = _common(a, b)
    rows = dict(a.rows)
    for res, poly in b.rows.items():
        rows[res] = rows[res] + poly if res in rows else poly
    return QuasiPolynomial(a.params, period, rows)


def qp_sum(qps: Iterable[QuasiPolynomial], params: Sequence[str]) -> QuasiPolynomial:
    qps = list(qps)
    if not qps:
        return QuasiPolynomial.zero(params)
    period = tuple(lcm(*(q.period[i] for q in qps)) for i in range(len(params)))
    rows: dict = {}
    for q in qps:
        for res, poly in q.lift(period).rows.items():
            rows[res] = rows[res] + poly if res in rows else poly
    return QuasiPolynomial(params, period, rows)


def qp_scale(a: QuasiPolynomial, c) -> QuasiPolynomial:
    return QuasiPolynomial(a.params, a.period, {r: p.scale(c) for r, p in a.rows.items()})


def qp_compose_affine(qp: QuasiPolynomial, substitution: Sequence[AffineForm],
                      params: Sequence[str] | None = None) -> QuasiPolynomial:
    """``result(p') = qp(substitution(p'))``; forms must have integer coefficients."""
    if len(substitution) != qp.nparams:
        raise ValueError("one substitution form per parameter is required")
    params = tuple(params) if params is not None else tuple(qp.params)
    nnew = len(params)
    ints = []
    for f in substitution:
        if f.nparams != nnew:
            raise ValueError("substitution forms must be over the new parameters")
        if any(c.denominator != 1 for c in f.coeffs) or f.constant.denominator != 1:
            raise ValueError("substitution forms need integer coefficients")
        ints.append(([int(c) for c in f.coeffs], int(f.constant)))
    new_period = []
    for j in range(nnew):
        pj = 1
        for (co, _), p in zip(ints, qp.period):
            pj = lcm(pj, p // gcd(co[j], p))
        new_period.append(pj)
    cache: dict = {}
    rows = {}
    for res in product(*(range(p) for p in new_period)):
        src = tuple((sum(c * r for c, r in zip(co, res)) + k) % p for (co, k), p in zip(ints, qp.period))
        if src not in qp.rows:
            continue
        if src not in cache:
            cache[src] = qp.rows[src].substitute(list(substitution))
        rows[res] = cache[src]
    return QuasiPolynomial(params, new_period, rows)


# -- constraints and pieces ----------------------------------------------------

GE0 = "ge0"
LE_M1 = "le-1"
CONGRUENCE = "congruence"


@dataclass(frozen=True, order=True)
class CaseConstraint:
    """``coeffs . b + constant >= 0`` (``ge0``), ``<= -1`` (``le-1``) or
    ``== residue (mod modulus)`` (``congruence``)."""

    kind: str
    coeffs: tuple[int, ...]
    constant: int = 0
    modulus: int = 0
    residue: int = 0

    def __post_init__(self):
        if self.kind not in (GE0, LE_M1, CONGRUENCE):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == CONGRUENCE:
            if self.modulus < 1 or not 0 <= self.residue < self.modulus:
                raise ValueError("congruence residue must lie in [0, modulus)")

    def value(self, point) -> int:
        return sum(c * x for c, x in zip(self.coeffs, point)) + self.constant

    def holds(self, point) -> bool:
        v = self.value(point)
        if self.kind == GE0:
            return v >= 0
        if self.kind == LE_M1:
            return v <= -1
        return v % self.modulus == self.residue

    def to_json(self) -> dict:
        out = {"type": self.kind, "coeffs": list(self.coeffs), "constant": self.constant}
        if self.kind == CONGRUENCE:
            out["modulus"] = self.modulus
            out["residue"] = self.residue
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CaseConstraint":
        return cls(data["type"], tuple(int(c) for c in data["coeffs"]), int(data["constant"]),
                   int(data.get("modulus", 0)), int(data.get("residue", 0)))

    def render(self, params: Sequence[str]) -> str:
        lhs = _render_linear(self.coeffs, self.constant, params)
        if self.kind == GE0:
            return f"{lhs} >= 0"
        if self.kind == LE_M1:
            return f"{lhs} <= -1"
        return f"{lhs} = {self.residue} (mod {self.modulus})"


@dataclass(frozen=True)
class Piece:
    """A closed chamber and its quasi-polynomial.

    ``qp`` is a :class:`QuasiPolynomial` or, when the residue table would be
    too large, a lazily evaluated sum (``vpf.final.LeafSum``) with the same
    call/degree/period interface.
    """

    constraints: tuple[CaseConstraint, ...]
    qp: "QuasiPolynomial"

    def contains(self, point) -> bool:
        return all(c.holds(point) for c in self.constraints)


@dataclass
class PiecewiseQP:
    params: tuple[str, ...]
    pieces: list[Piece]
    matrix: tuple[tuple[int, ...], ...] | None = None
    meta: dict = field(default_factory=dict)

    def applicable(self, point) -> list[Piece]:
        return [p for p in self.pieces if p.contains(point)]

    def values(self, point) -> list[Fraction]:
        return [p.qp(point) for p in self.applicable(point)]

    def __call__(self, point) -> Fraction:
        """Value at ``point``; 0 where no piece applies (outside the cone of ``A``)."""
        vals = self.values(point)
        if not vals:
            return Fraction(0)
        if any(v != vals[0] for v in vals):
            raise ValueError(f"pieces disagree at {tuple(point)}: {vals}")
        return vals[0]

    @property
    def degree(self) -> int:
        return max((p.qp.degree for p in self.pieces), default=-1)


def reciprocity_transform(pw: PiecewiseQP) -> PiecewiseQP:
    """Map every piece ``q`` to ``(-1)**(d - rank) * q(-b - r)``.

    For a counting function this is the identity on pieces (each chamber's
    quasi-polynomial is self-reciprocal); the result is what the pairing test
    compares against.
    """
    from .engine import SystemMatrix

    if pw.matrix is None:
        raise ValueError("reciprocity needs the matrix")
    A = SystemMatrix(pw.matrix)
    sign = (-1) ** (A.d - A.rank)
    r = A.row_sums
    n = len(pw.params)
    subs = [AffineForm.param(n, i, -1) - r[i] for i in range(n)]
    pieces = []
    for p in pw.pieces:
        if isinstance(p.qp, QuasiPolynomial):
            qp = qp_scale(qp_compose_affine(p.qp, subs), sign)
        else:
            qp = p.qp.compose(subs).scale(sign)
        cons = tuple(CaseConstraint(c.kind, tuple(-x for x in c.coeffs),
                                    c.constant - sum(x * ri for x, ri in zip(c.coeffs, r)),
                                    c.modulus, c.residue)
                     for c in p.constraints)
        pieces.append(Piece(cons, qp))
    return PiecewiseQP(pw.params, pieces, pw.matrix, dict(pw.meta))


# -- rendering -------------------------------------------------------------------

def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _parse_frac(s: str) -> Fraction:
    return Fraction(s)


def _monomial(exp, params) -> str:
    parts = []
    for e, name in zip(exp, params):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _scaled(c: Fraction, mono: str) -> tuple[str, str]:
    """(sign, body) for ``c * mono`` in the ``3*b/2`` style."""
    sign = "-" if c < 0 else "+"
    c = abs(c)
    num, den = c.numerator, c.denominator
    if not mono:
        body = str(num) if den == 1 else f"{num}/{den}"
    else:
        body = mono if num == 1 else f"{num}*{mono}"
        if den != 1:
            body = f"{body}/{den}"
    return sign, body


def _render_linear(coeffs, constant, params) -> str:
    parts = []
    for c, name in zip(coeffs, params):
        if c:
            parts.append(_scaled(Fraction(c), name))
    if constant or not parts:
        parts.append(_scaled(Fraction(constant), ""))
    return _join(parts)


def _join(parts) -> str:
    out = ""
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out or "0"


def _periodic_coefficient(values: dict, qp: QuasiPolynomial) -> str | None:
    """Render a coefficient that varies with the residue class, or None if constant."""
    distinct = set(values.values())
    if len(distinct) == 1 and len(values) == _grid_size(qp.period):
        return None
    varying = [i for i, p in enumerate(qp.period) if p > 1 and
               any(values.get(res, 0) != values.get(res[:i] + ((res[i] + 1) % p,) + res[i + 1:], 0)
                   for res in qp.residues())]
    if len(varying) == 1 and qp.period[varying[0]] == 2:
        i = varying[0]
        base = tuple(0 for _ in qp.period)
        c0 = values.get(base, Fraction(0))
        c1 = values.get(base[:i] + (1,) + base[i + 1:], Fraction(0))
        mean, osc = (c0 + c1) / 2, (c0 - c1) / 2
        den = lcm(mean.denominator, osc.denominator)
        a, b = mean * den, osc * den
        name = qp.params[i]
        inner = _join([_scaled(a, "")] * (1 if a else 0) + [_scaled(b, f"(-1)^{name}")])
        return f"({inner})/{den}" if den != 1 else f"({inner})"
    cells = ", ".join(f"{','.join(map(str, res))}:{values.get(res, 0)}" for res in qp.residues())
    mods = ",".join(f"{n} mod {p}" for n, p in zip(qp.params, qp.period))
    return f"[{cells}]_({mods})"


def _grid_size(period) -> int:
    n = 1
    for p in period:
        n *= p
    return n


def render_qp(qp: QuasiPolynomial) -> str:
    """Text form: ``b^2/2 + 3*b/2 + 1``, with ``(-1)^a`` for period-2 oscillations."""
    if not isinstance(qp, QuasiPolynomial):
        return qp.render()
    qp = qp.minimize()
    by_exp: dict = {}
    for res, poly in qp.rows.items():
        for e, c in poly.terms.items():
            by_exp.setdefault(e, {})[res] = c
    parts = []
    for e in sorted(by_exp, key=lambda e: (-sum(e), tuple(-x for x in e))):
        mono = _monomial(e, qp.params)
        periodic = _periodic_coefficient(by_exp[e], qp)
        if periodic is None:
            parts.append(_scaled(next(iter(by_exp[e].values())), mono))
        else:
            parts.append(("+", f"{periodic}*{mono}" if mono else periodic))
    return _join(parts)


def render_constraints(cons: Sequence[CaseConstraint], params) -> str:
    return ", ".join(c.render(params) for c in cons) or "everywhere"


def qp_to_json(qp: QuasiPolynomial) -> dict:
    if not isinstance(qp, QuasiPolynomial):
        qp = qp.explicit()
    by_exp: dict = {}
    for res, poly in sorted(qp.rows.items()):
        for e, c in poly.terms.items():
            by_exp.setdefault(e, {})[",".join(map(str, res))] = _frac_str(c)
    return {"period": list(qp.period),
            "terms": [{"exponents": list(e), "coeffsByResidue": by_exp[e]} for e in sorted(by_exp)]}


def qp_from_json(params, data: dict) -> QuasiPolynomial:
    coeffs = {}
    for t in data["terms"]:
        e = tuple(int(x) for x in t["exponents"])
        for key, val in t["coeffsByResidue"].items():
            res = tuple(int(x) for x in key.split(",")) if key else ()
            coeffs[(res, e)] = _parse_frac(val)
    return QuasiPolynomial.from_coeffs(params, data["period"], coeffs)


def to_json(obj: QuasiPolynomial | PiecewiseQP, matrix=None) -> str:
    """Serialize to the ``vpf-1`` schema (deterministic key order)."""
    if isinstance(obj, QuasiPolynomial):
        doc = {"version": SCHEMA_VERSION, "matrix": [list(r) for r in matrix] if matrix else [],
               "kind": "single", "parameters": list(obj.params),
               "pieces": [dict(constraints=[], **qp_to_json(obj))]}
    else:
        doc = {"version": SCHEMA_VERSION,
               "matrix": [list(r) for r in (obj.matrix or matrix or [])],
               "kind": "piecewise", "parameters": list(obj.params),
               "pieces": [dict(constraints=[c.to_json() for c in p.constraints], **qp_to_json(p.qp))
                          for p in obj.pieces]}
    return json.dumps(doc, indent=1, sort_keys=True)


def from_json(text: str) -> QuasiPolynomial | PiecewiseQP:
    doc = json.loads(text)
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {doc.get('version')!r}")
    params = tuple(doc["parameters"])
    pieces = [Piece(tuple(CaseConstraint.from_json(c) for c in p["constraints"]), qp_from_json(params, p))
              for p in doc["pieces"]]
    matrix = tuple(tuple(r) for r in doc["matrix"]) or None
    if doc["kind"] == "single":
        return pieces[0].qp
    return PiecewiseQP(params, pieces, matrix)


def qp_render(obj, fmt: str = "text") -> str:
    if fmt == "json":
        return to_json(obj)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, QuasiPolynomial):
        return render_qp(obj)
    lines = []
    for p in obj.pieces:
        lines.append(f"{render_qp(p.qp)}    if {render_constraints(p.constraints, obj.params)}")
    return "\n".join(lines)
