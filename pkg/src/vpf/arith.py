"""Exact arithmetic: parameter polynomials, affine forms and generating-function terms.

Everything here is immutable.  Rationals are :class:`fractions.Fraction`,
integers are Python ints, so there is no rounding anywhere.

A *generating-function term* is ``coeff * z**E / prod(factors)`` where the
exponent vector ``E`` holds :class:`AffineForm` entries in the symbolic
parameters (the right-hand side ``b`` or the dilation ``t``) and every
factor is ``(1 - z**v)`` or a geometric sum ``1 + z**v + ... + z**((g-1)v)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

Exp = tuple[int, ...]


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size limit."""


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        v = abs(int(v))
        if v:
            out = out * v // gcd(out, v)
    return out


class Poly:
    """Multivariate polynomial with rational coefficients in ``nvars`` symbols."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exp, Fraction] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[tuple(e)] = Fraction(c)
        self.terms: dict[Exp, Fraction] = clean
        self._hash = None

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def from_affine(cls, form: "AffineForm") -> "Poly":
        n = form.nparams
        terms: dict[Exp, Fraction] = {}
        if form.constant:
            terms[(0,) * n] = form.constant
        for i, c in enumerate(form.coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        """The value if the polynomial is constant, else ``None``."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            if not any(e):
                return c
        return None

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly(self.nvars)
        return Poly(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        if len(other.terms) == 1:
            (f, d), = other.terms.items()
            if not any(f):
                return self.scale(d)
        out: dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __call__(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def substitute(self, forms: Sequence["AffineForm"]) -> "Poly":
        """Replace symbol ``i`` by the affine form ``forms[i]`` (over new symbols)."""
        nnew = forms[0].nparams if forms else 0
        powers = [[Poly.const(nnew, 1)] for _ in forms]
        out = Poly(nnew)
        for e, c in self.terms.items():
            term = Poly.const(nnew, c)
            for i, k in enumerate(e):
                if k:
                    while len(powers[i]) <= k:
                        powers[i].append(powers[i][-1] * Poly.from_affine(forms[i]))
                    term = term * powers[i][k]
            out = out + term
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        return "Poly(" + " + ".join(f"{c}*{e}" for e, c in sorted(self.terms.items())) + ")"


def binomial_poly(k: int) -> Poly:
    """``C(q, k)`` as a polynomial in the single symbol ``q``."""
    out = Poly.const(1, 1)
    for j in range(k):
        out = out * Poly(1, {(1,): Fraction(1), (0,): Fraction(-j)})
    return out.scale(Fraction(1, _factorial(k)))


def _factorial(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


@dataclass(frozen=True)
class AffineForm:
    """``sum(coeffs[i] * p_i) + constant`` over the symbolic parameters.

    Coefficients are rational: exponents produced by reducing ``x**e`` modulo
    ``1 - x**a * u`` carry ``(e - r) / a``, integral on the congruence class
    that guards them.
    """

    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)

    @classmethod
    def make(cls, coeffs: Iterable, constant=0) -> "AffineForm":
        return cls(tuple(Fraction(c) for c in coeffs), Fraction(constant))

    @classmethod
    def zero(cls, nparams: int) -> "AffineForm":
        return cls((Fraction(0),) * nparams, Fraction(0))

    @classmethod
    def constant_form(cls, nparams: int, c) -> "AffineForm":
        return cls((Fraction(0),) * nparams, Fraction(c))

    @classmethod
    def param(cls, nparams: int, i: int, scale=1) -> "AffineForm":
        co = [Fraction(0)] * nparams
        co[i] = Fraction(scale)
        return cls(tuple(co), Fraction(0))

    @property
    def nparams(self) -> int:
        return len(self.coeffs)

    def is_constant(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        if isinstance(other, AffineForm):
            return AffineForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                              self.constant + other.constant)
        return AffineForm(self.coeffs, self.constant + Fraction(other))

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(tuple(-a for a in self.coeffs), -self.constant)

    def __sub__(self, other):
        return self + (-other if isinstance(other, AffineForm) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AffineForm":
        c = Fraction(c)
        return AffineForm(tuple(a * c for a in self.coeffs), self.constant * c)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __call__(self, assignment: Sequence) -> Fraction | int:
        return af_eval(self, assignment)

    def compose(self, forms: Sequence["AffineForm"]) -> "AffineForm":
        """Substitute parameter ``i`` by ``forms[i]``."""
        out = AffineForm.constant_form(forms[0].nparams if forms else 0, self.constant)
        for c, f in zip(self.coeffs, forms):
            if c:
                out = out + f.scale(c)
        return out

    def integral(self) -> tuple[tuple[int, ...], int, int]:
        """``(coeffs, constant, D)`` with ``self == (coeffs . p + constant) / D``, all integers, D > 0."""
        D = lcm(*(c.denominator for c in self.coeffs), self.constant.denominator)
        return (tuple(int(c * D) for c in self.coeffs), int(self.constant * D), D)

    def __repr__(self) -> str:
        return f"AffineForm({[str(c) for c in self.coeffs]}, {self.constant})"


def af_eval(form: AffineForm, assignment: Sequence) -> Fraction | int:
    """Evaluate ``form`` at an integer parameter assignment."""
    if len(assignment) < form.nparams:
        missing = [i for i, c in enumerate(form.coeffs) if c and i >= len(assignment)]
        if missing:
            raise ValueError(f"assignment is missing parameters {missing}")
    v = form.constant + sum((c * x for c, x in zip(form.coeffs, assignment) if c), Fraction(0))
    return int(v) if v.denominator == 1 else v


BINOMIAL = "binomial"
GEOMSUM = "geomsum"


@dataclass(frozen=True, order=True)
class FactorAtom:
    """``(1 - z^v)`` or ``1 + z^v + ... + z^((order-1) v)``, raised to ``multiplicity``."""

    kind: str
    vector: tuple[int, ...]
    order: int = 1
    multiplicity: int = 1

    def __post_init__(self):
        if not any(self.vector):
            raise ValueError("factor exponent vector must be nonzero")
        if self.kind == GEOMSUM and self.order < 2:
            raise ValueError("geometric sum needs order >= 2")
        if self.kind not in (BINOMIAL, GEOMSUM):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    @classmethod
    def binomial(cls, vector, multiplicity: int = 1) -> "FactorAtom":
        return cls(BINOMIAL, tuple(vector), 1, multiplicity)

    @classmethod
    def geomsum(cls, vector, order: int, multiplicity: int = 1) -> "FactorAtom":
        return cls(GEOMSUM, tuple(vector), order, multiplicity)

    def value(self, zpoint: Sequence[Fraction]) -> Fraction:
        m = monomial_value(self.vector, zpoint)
        if self.kind == BINOMIAL:
            base = 1 - m
        else:
            base = sum((m ** k for k in range(self.order)), Fraction(0))
        return base ** self.multiplicity


def monomial_value(vector: Sequence[int], zpoint: Sequence[Fraction]) -> Fraction:
    v = Fraction(1)
    for z, k in zip(zpoint, vector):
        if k:
            if z == 0 and k < 0:
                raise ZeroDivisionError("zero base with negative exponent")
            v *= Fraction(z) ** k
    return v


@dataclass(frozen=True)
class GFTerm:
    """``coefficient * z**exponents / prod(denominator)``.

    ``coefficient`` is a :class:`Poly` in the parameters; binomial-coefficient
    factors from repeated poles make it non-constant.
    """

    coefficient: Poly
    exponents: tuple[AffineForm, ...]
    denominator: tuple[FactorAtom, ...] = ()

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    def variables(self) -> set[int]:
        used = {i for i, e in enumerate(self.exponents) if e != AffineForm.zero(e.nparams)}
        for f in self.denominator:
            used |= {i for i, k in enumerate(f.vector) if k}
        return used


def term_eval(term: GFTerm, zpoint: Sequence, assignment: Sequence) -> Fraction:
    """Exact value of ``term`` at ``zpoint`` with parameters fixed to ``assignment``."""
    zpoint = [Fraction(z) for z in zpoint]
    exps = []
    for e in term.exponents:
        v = af_eval(e, assignment)
        if not isinstance(v, int):
            raise ValueError(f"exponent {e} is not integral at {tuple(assignment)}")
        exps.append(v)
    den = Fraction(1)
    for f in term.denominator:
        val = f.value(zpoint)
        if val == 0:
            raise ZeroDivisionError(f"denominator factor {f} vanishes at {zpoint}")
        den *= val
    return term.coefficient(assignment) * monomial_value(exps, zpoint) / den


def expr_eval(terms: Iterable[GFTerm], zpoint, assignment) -> Fraction:
    return sum((term_eval(t, zpoint, assignment) for t in terms), Fraction(0))


def series_coefficients(factors: Sequence[tuple[int, int]], n: int) -> list[Fraction]:
    """Coefficients ``0..n`` of ``1 / prod (1 - z**a)**mult`` (all ``a >= 1``)."""
    from . import kernels

    parts = []
    for a, mult in factors:
        if a < 1:
            raise ValueError(f"factor 1 - z^{a} is not expandable at z = 0")
        parts.extend([a] * mult)
    return [Fraction(c) for c in kernels.series_coeffs(parts, n)]


def series_coefficient(terms: Iterable[GFTerm], n: int) -> Fraction:
    """Coefficient of ``z**n`` in the power-series expansion of a univariate expression."""
    total = Fraction(0)
    for t in terms:
        if t.nvars != 1:
            raise ValueError("series_coefficient expects a single z-variable")
        e = t.exponents[0]
        if not e.is_constant():
            raise ValueError("parametric exponent remaining; substitute parameters first")
        c = t.coefficient.constant_value()
        if c is None:
            raise ValueError("coefficient still depends on parameters")
        shift = e.constant
        if shift.denominator != 1:
            raise ValueError("non-integral exponent")
        k = n - int(shift)
        if k < 0:
            continue
        facs: list[tuple[int, int]] = []
        num = [Fraction(1)]
        for f in t.denominator:
            a = f.vector[0]
            if f.kind == BINOMIAL:
                if a < 1:
                    raise ValueError(f"factor (1 - z^{a}) not expandable at 0")
                facs.append((a, f.multiplicity))
            else:
                # 1/GeomSum(v, g) = (1 - z^v) / (1 - z^{g v})
                if a < 1:
                    raise ValueError("geometric sum with nonpositive exponent")
                facs.append((a * f.order, f.multiplicity))
                for _ in range(f.multiplicity):
                    num = _poly_mul(num, [Fraction(1)] + [Fraction(0)] * (a - 1) + [Fraction(-1)])
        coeffs = series_coefficients(facs, k)
        total += c * sum((num[j] * coeffs[k - j] for j in range(min(len(num), k + 1))), Fraction(0))
    return total


def _poly_mul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def geomsum_identity_holds(vector: Sequence[int], g: int, zpoint: Sequence) -> bool:
    """Check ``1 - z^(g v) == (1 - z^v) * GeomSum(v, g)`` at one rational point."""
    zpoint = [Fraction(z) for z in zpoint]
    lhs = 1 - monomial_value([g * k for k in vector], zpoint)
    rhs = FactorAtom.binomial(vector).value(zpoint) * FactorAtom.geomsum(vector, g).value(zpoint)
    return lhs == rhs


__all__ = [
    "AffineForm", "FactorAtom", "GFTerm", "Poly", "ResourceLimitError", "af_eval", "binomial_poly",
    "expr_eval", "geomsum_identity_holds", "lcm", "monomial_value", "series_coefficient",
    "series_coefficients", "term_eval",
]
