"""Constant term in the last remaining variable.

A univariate term ``c * t**e / prod (1 - t**a)**mult`` has constant term
``D(-e)`` where ``D(n)`` is the coefficient of ``t**n`` in
``1 / prod (1 - t**a)**mult`` (a restricted partition count).  ``D`` agrees
with a quasi-polynomial of period ``lcm(a)`` for every ``n > -deg``; that
quasi-polynomial is found by exact interpolation of series coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Iterable, Mapping, Sequence

from . import kernels
from .arith import AffineForm, Poly, ResourceLimitError, lcm, series_coefficients
from .engine import Congruence, Elimination, GuardedTerm, SignAtom
from .quasipoly import QuasiPolynomial, qp_sum


class InterpolationError(ArithmeticError):
    """Samples are inconsistent with the requested degree and period."""


def _interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> dict[tuple[int], Fraction]:
    """Coefficients of the polynomial through ``(xs, ys)`` (Newton divided differences)."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    # expand Newton form into monomials
    poly = [Fraction(0)] * n
    basis = [Fraction(1)]
    for i in range(n):
        for k, b in enumerate(basis):
            poly[k] += coef[i] * b
        nxt = [Fraction(0)] * (len(basis) + 1)
        for k, b in enumerate(basis):
            nxt[k + 1] += b
            nxt[k] -= xs[i] * b
        basis = nxt
    return {(k,): c for k, c in enumerate(poly) if c}


def qp_from_samples(samples: Mapping[int, Fraction], degree_bound: int, period: int,
                    name: str = "n") -> QuasiPolynomial:
    """The quasi-polynomial of degree <= ``degree_bound`` and this period through ``samples``.

    Every residue class needs ``degree_bound + 1`` samples; extra samples must
    agree with the fit.
    """
    classes: dict[int, list[int]] = {}
    for n in sorted(samples):
        classes.setdefault(n % period, []).append(n)
    rows = {}
    for rho in range(period):
        pts = classes.get(rho, [])
        if len(pts) < degree_bound + 1:
            raise InterpolationError(f"residue {rho} mod {period}: {len(pts)} samples, "
                                     f"need {degree_bound + 1}")
        fit = pts[:degree_bound + 1]
        poly = Poly(1, _interpolate(fit, [Fraction(samples[n]) for n in fit]))
        for n in pts[degree_bound + 1:]:
            if poly((n,)) != samples[n]:
                raise InterpolationError(f"sample at n = {n} contradicts the degree-{degree_bound}, "
                                         f"period-{period} fit")
        rows[(rho,)] = poly
    return QuasiPolynomial((name,), (period,), rows)


def _poly_divmod(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / den[-1]
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    return q, num[:len(den) - 1]


def denumerant_qp(factors: Sequence[tuple[int, int]], numerator: Sequence = (1,)):
    """Coefficients of ``numerator(z) / prod (1 - z**a)**mult`` as ``(QP, corrections)``.

    For ``n >= 0`` the coefficient of ``z**n`` is ``QP(n) + corrections.get(n, 0)``;
    corrections come from the polynomial part of an improper fraction.
    """
    factors = tuple(sorted((int(a), int(k)) for a, k in factors))
    numerator = tuple(Fraction(c) for c in numerator)
    if any(a < 1 or k < 1 for a, k in factors):
        raise ValueError("factors need a >= 1 and multiplicity >= 1")
    return _denumerant(factors, numerator)


@lru_cache(maxsize=None)
def _denumerant(factors, numerator):
    den = [Fraction(1)]
    for a, k in factors:
        for _ in range(k):
            nxt = [Fraction(0)] * (len(den) + a)
            for i, c in enumerate(den):
                nxt[i] += c
                nxt[i + a] -= c
            den = nxt
    num = list(numerator)
    while num and num[-1] == 0:
        num.pop()
    corrections: dict[int, Fraction] = {}
    if len(num) >= len(den):
        quot, num = _poly_divmod(num, den)
        corrections = {i: c for i, c in enumerate(quot) if c}
    period = lcm(*(a for a, _ in factors))
    nfac = sum(k for _, k in factors)
    nmax = period * (nfac + 1) + period
    base = series_coefficients(factors, nmax)
    coeffs = [sum((num[j] * base[n - j] for j in range(min(len(num), n + 1))), Fraction(0))
              for n in range(nmax + 1)]
    qp = qp_from_samples(dict(enumerate(coeffs)), max(nfac - 1, 0), period)
    return qp.minimize(), corrections


_SERIES: dict[tuple[tuple[int, int], ...], list[int]] = {}


def partition_count(factors: Sequence[tuple[int, int]], n: int) -> int:
    """``D(n)``: the quasi-polynomial continuation of the coefficients of ``1 / prod (1 - z**a)**mult``.

    For ``n >= 0`` this is the series coefficient, ``D(n) = 0`` for ``-deg < n < 0``,
    and below that the reciprocity law ``D(-n - deg) = (-1)**(k - 1) * D(n)`` applies
    (``deg = sum a*mult``, ``k = sum mult``).
    """
    if n >= 0 and isinstance(factors, tuple):
        table = _SERIES.get(factors)
        if table is not None and n < len(table):
            return table[n]
    factors = tuple(sorted((int(a), int(k)) for a, k in factors))
    n = int(n)
    if n < 0:
        deg = sum(a * k for a, k in factors)
        if n > -deg:
            return 0
        k = sum(k for _, k in factors)
        return (-1) ** (k - 1) * partition_count(factors, -n - deg)
    table = _SERIES.get(factors)
    if table is None or len(table) <= n:
        size = max(n + 1, 2 * len(table) if table else 64)
        parts = [a for a, k in factors for _ in range(k)]
        table = list(kernels.series_coeffs(parts, size - 1))
        _SERIES[factors] = table
    return table[n]


def _compose_congruence(c: Congruence, forms: Sequence[AffineForm]):
    coeffs = [0] * (forms[0].nparams if forms else 0)
    const = c.constant
    for ci, f in zip(c.coeffs, forms):
        if ci:
            fc, fk, D = f.integral()
            if D != 1:
                raise ValueError("congruences compose with integer forms only")
            for j, x in enumerate(fc):
                coeffs[j] += ci * x
            const += ci * fk
    return Congruence.make(coeffs, const, c.modulus)


@dataclass(frozen=True)
class FinalLeaf:
    """``coefficient(p) * D(n(p))`` on the guard region, ``D`` the partition count of ``factors``.

    A leaf without factors stands for ``coefficient(p)`` where ``n(p) == 0``.
    """

    coefficient: Poly
    argument: AffineForm
    factors: tuple[tuple[int, int], ...]
    signs: tuple[SignAtom, ...] = ()
    congruences: tuple[Congruence, ...] = ()

    def active(self, point) -> bool:
        return all(c.holds(point) for c in self.congruences) and all(s.is_on(point) for s in self.signs)

    def value(self, point) -> Fraction:
        if not self.active(point):
            return Fraction(0)
        return self._raw(point)

    def qp_value(self, point) -> Fraction:
        """Value of the leaf's quasi-polynomial, ignoring the sign guards."""
        if not all(c.holds(point) for c in self.congruences):
            return Fraction(0)
        return self._raw(point)

    def _raw(self, point) -> Fraction:
        n = self.argument(point)
        if not self.factors:
            return self.coefficient(point) if n == 0 else Fraction(0)
        if not isinstance(n, int):
            raise ArithmeticError(f"argument {n} is not integral at {tuple(point)}")
        return self.coefficient(point) * partition_count(self.factors, n)

    @property
    def degree_bound(self) -> int:
        k = sum(m for _, m in self.factors)
        return self.coefficient.degree + max(k - 1, 0)

    @property
    def base_period(self) -> int:
        return lcm(*(a for a, _ in self.factors)) if self.factors else 1

    def period_vector(self) -> tuple[int, ...]:
        cached = self.__dict__.get("_pv")
        if cached is not None:
            return cached
        coeffs, _, D = self.argument.integral()
        P = self.base_period
        out = []
        for i, f in enumerate(coeffs):
            p = (D * P) // gcd(f, D * P)
            for c in self.congruences:
                p = lcm(p, c.modulus // gcd(c.coeffs[i], c.modulus))
            out.append(p)
        out = tuple(out)
        object.__setattr__(self, "_pv", out)
        return out

    def compose(self, forms: Sequence[AffineForm]) -> "FinalLeaf | None":
        """Substitute parameter ``i`` by the integer form ``forms[i]``; None if never active."""
        congs = []
        for c in self.congruences:
            c2 = _compose_congruence(c, forms)
            if c2 is False:
                return None
            if c2 is not True:
                congs.append(c2)
        signs = tuple(SignAtom(s.form.compose(forms), s.on_max, s.off_min) for s in self.signs)
        return FinalLeaf(self.coefficient.substitute(forms), self.argument.compose(forms),
                         self.factors, signs, tuple(sorted(set(congs))))

    def to_qp(self, params: Sequence[str]) -> QuasiPolynomial:
        """Explicit residue table (the guards' sign atoms are not part of it)."""
        if not self.factors:
            if not (self.argument.is_constant() and self.argument.constant == 0):
                raise ValueError("equality-supported leaf has no quasi-polynomial")
            dqp = QuasiPolynomial(("n",), (1,), {(0,): Poly.const(1, 1)})
        else:
            dqp, _ = denumerant_qp(self.factors)
        P = dqp.period[0]
        coeffs, const, D = self.argument.integral()
        period = self.period_vector()
        cache: dict = {}
        rows = {}
        for res in product(*(range(p) for p in period)):
            if not all(c.holds(res) for c in self.congruences):
                continue
            val = sum(c * r for c, r in zip(coeffs, res)) + const
            if val % D:
                raise ArithmeticError(f"argument not integral on residue class {res}")
            nres = (val // D) % P
            if nres not in cache:
                row = dqp.rows.get((nres,))
                cache[nres] = (self.coefficient * row.substitute([self.argument])
                               if row is not None else None)
            if cache[nres] is not None:
                rows[res] = cache[nres]
        return QuasiPolynomial(params, period, rows)

    def render(self, params: Sequence[str]) -> str:
        coef = render_poly(self.coefficient, params)
        parts = ",".join(f"{a}^{k}" if k > 1 else str(a) for a, k in self.factors)
        arg = render_form(self.argument, params)
        out = f"({coef})*P[{parts}]({arg})" if self.factors else f"({coef})*[{arg} = 0]"
        for c in self.congruences:
            out += f" if {render_form(AffineForm.make(c.coeffs, c.constant), params)} = 0 (mod {c.modulus})"
        return out


def render_poly(poly: Poly, params) -> str:
    from .quasipoly import render_qp
    return render_qp(QuasiPolynomial.polynomial(params, poly)) if not poly.is_zero() else "0"


def render_form(form: AffineForm, params) -> str:
    return render_poly(Poly.from_affine(form), params)


class LeafSum:
    """A quasi-polynomial kept as a sum of leaves ``c(p) * D(n(p))`` restricted to congruence classes.

    Used when the explicit residue table would be too large; it evaluates
    exactly anywhere (including negative arguments) and can be expanded into a
    :class:`QuasiPolynomial` on request.  Affine substitutions and scalings
    are recorded and applied at evaluation time.
    """

    def __init__(self, params: Sequence[str], leaves: Iterable[FinalLeaf], merge: bool = True,
                 substitution: Sequence[AffineForm] | None = None, factor=1):
        self.params = tuple(params)
        self.substitution = tuple(substitution) if substitution is not None else None
        self.factor = Fraction(factor)
        self._period = None
        self._compiled = None
        if not merge:
            self.leaves = tuple(leaves)
            return
        merged: dict = {}
        for leaf in leaves:
            key = (leaf.argument, leaf.factors, leaf.congruences)
            merged[key] = merged[key] + leaf.coefficient if key in merged else leaf.coefficient
        self.leaves = tuple(FinalLeaf(c, arg, fac, (), congs)
                            for (arg, fac, congs), c in merged.items() if not c.is_zero())

    def _compile(self):
        # distinct monomials, congruences and arguments are evaluated once per point
        monos: dict = {}
        congs: dict = {}
        args: dict = {}
        den = 1
        for leaf in self.leaves:
            for e, c in leaf.coefficient.terms.items():
                monos.setdefault(e, len(monos))
                den = lcm(den, c.denominator)
        entries = []
        for leaf in self.leaves:
            coef = tuple((monos[e], int(c * den)) for e, c in leaf.coefficient.terms.items())
            arg = args.setdefault(leaf.argument.integral(), len(args))
            cs = tuple(congs.setdefault((c.coeffs, c.constant, c.modulus), len(congs))
                       for c in leaf.congruences)
            fac = tuple(sorted(leaf.factors)) if leaf.factors else None
            entries.append((coef, arg, cs, fac))
        self._compiled = (tuple(monos), tuple(congs), tuple(args), den, entries)
        return self._compiled

    def _base_value(self, point: Sequence[int]) -> Fraction:
        monos, congs, args, den, entries = self._compiled or self._compile()
        point = [int(x) for x in point]
        mv = []
        for e in monos:
            v = 1
            for x, k in zip(point, e):
                if k:
                    v *= x ** k
            mv.append(v)
        cv = [(sum(c * x for c, x in zip(cc, point)) + ck) % cm == 0 for cc, ck, cm in congs]
        av = []
        for ac, ak, ad in args:
            n = sum(c * x for c, x in zip(ac, point)) + ak
            av.append((n // ad, n % ad == 0))
        total = 0
        for coef, arg, cs, fac in entries:
            if cs and not all(cv[i] for i in cs):
                continue
            n, integral = av[arg]
            if fac is None:
                if n or not integral:
                    continue
                d = 1
            else:
                if not integral:
                    raise ArithmeticError(f"argument is not integral at {tuple(point)}")
                d = partition_count(fac, n)
                if not d:
                    continue
            total += d * sum(c * mv[i] for i, c in coef)
        return Fraction(total, den)

    def __call__(self, point: Sequence[int]) -> Fraction:
        if self.substitution is not None:
            point = [f(point) for f in self.substitution]
        if not self.factor:
            return Fraction(0)
        return self.factor * self._base_value(point)

    @property
    def degree(self) -> int:
        """Upper bound on the degree (exact after :meth:`explicit`)."""
        if not self.factor:
            return -1
        return max((leaf.degree_bound for leaf in self.leaves), default=-1)

    @property
    def period(self) -> tuple[int, ...]:
        if self._period is None:
            out = [1] * len(self.substitution[0].coeffs if self.substitution else self.params)
            base = [1] * len(self.leaves[0].argument.coeffs) if self.leaves else []
            for pv in {leaf.period_vector() for leaf in self.leaves}:
                base = [lcm(a, b) for a, b in zip(base, pv)]
            if self.substitution is None:
                out = base or out
            else:
                for f, p in zip(self.substitution, base):
                    for j, c in enumerate(f.coeffs):
                        out[j] = lcm(out[j], p // gcd(int(c), p))
            self._period = tuple(out)
        return self._period

    def table_size(self) -> int:
        n = 1
        for p in self.period:
            n *= p
        return n

    def is_zero(self) -> bool:
        return not self.leaves or not self.factor

    def scale(self, c) -> "LeafSum":
        return LeafSum(self.params, self.leaves, False, self.substitution, self.factor * Fraction(c))

    def compose(self, forms: Sequence[AffineForm], params: Sequence[str] | None = None) -> "LeafSum":
        """``p -> self(forms(p))``; forms need integer coefficients."""
        params = self.params if params is None else params
        for f in forms:
            if any(Fraction(c).denominator != 1 for c in f.coeffs) or Fraction(f.constant).denominator != 1:
                raise ValueError("substitution forms need integer coefficients")
        sub = tuple(forms) if self.substitution is None else tuple(f.compose(forms) for f in self.substitution)
        return LeafSum(params, self.leaves, False, sub, self.factor)

    def materialize(self) -> "LeafSum":
        """An equivalent LeafSum with the substitution and factor folded into the leaves."""
        if self.substitution is None and self.factor == 1:
            return self
        leaves = self.leaves
        if self.substitution is not None:
            leaves = [x for x in (leaf.compose(self.substitution) for leaf in leaves) if x is not None]
        return LeafSum(self.params, [FinalLeaf(leaf.coefficient.scale(self.factor), leaf.argument,
                                               leaf.factors, (), leaf.congruences)
                                     for leaf in leaves if self.factor])

    def explicit(self, max_rows: int = 20000, max_work: int = 400000) -> QuasiPolynomial:
        """The residue table, minimized; :class:`ResourceLimitError` beyond the limits."""
        rows = self.table_size()
        big = max((leaf.base_period for leaf in self.leaves), default=1)
        if rows > max_rows or rows * len(self.leaves) > max_work or big > max_rows:
            raise ResourceLimitError(f"explicit table needs {rows} residue classes "
                                     f"for {len(self.leaves)} leaves")
        flat = self.materialize()
        return qp_sum([leaf.to_qp(flat.params) for leaf in flat.leaves], flat.params).minimize()

    def render(self) -> str:
        flat = self.materialize()
        return " + ".join(leaf.render(flat.params) for leaf in flat.leaves) or "0"

    def __repr__(self) -> str:
        return f"LeafSum({len(self.leaves)} leaves, period={self.period})"


def const_term_leaf(gt: GuardedTerm, var: int) -> list[FinalLeaf]:
    """Constant term of a guarded term that involves only ``z_var``."""
    term = gt.term
    sign, shift = 1, 0
    counts: dict[int, int] = {}
    for f in term.denominator:
        if any(c for j, c in enumerate(f.vector) if j != var):
            raise ValueError("term still involves an eliminated variable")
        a, k = f.vector[var], f.multiplicity
        if a < 0:
            sign *= (-1) ** k
            shift -= k * a
            a = -a
        counts[a] = counts.get(a, 0) + k
    e = term.exponents[var] + shift
    factors = tuple(sorted(counts.items()))
    deg = sum(a * k for a, k in factors)
    coeff = term.coefficient.scale(sign)
    signs = gt.signs
    if not factors:
        if e.is_constant():
            if e.constant != 0:
                return []
        else:
            signs = signs + (SignAtom(e, 0, 1), SignAtom(-e, 0, 1))
    elif e.is_constant():
        if e.constant >= 1:
            return []
    else:
        signs = signs + (SignAtom(e, deg - 1, 1),)
    return [FinalLeaf(coeff, -e, factors, signs, gt.congruences)]


def finalize(el: Elimination) -> list[FinalLeaf]:
    leaves = []
    for gt in el.terms:
        leaves.extend(const_term_leaf(gt, el.last))
    return leaves


__all__ = ["FinalLeaf", "InterpolationError", "LeafSum", "const_term_leaf", "denumerant_qp",
           "finalize", "partition_count", "qp_from_samples", "render_form", "render_poly"]
