"""Iterated partial-fraction elimination on Euler's generating function.

``phi_A(b)`` is the constant term of ``z**(-b) / prod_k (1 - z**c_k)``.  One
variable ``x`` at a time, every term ``c * x**e / Q(x)`` (``Q(0) = 1`` after
orienting factors so their ``x``-exponent is positive) is replaced by its
``x``-constant term: zero when ``e >= 1``, and otherwise the sum over pole
families ``(1 - x**a * u)**mult`` of the numerator ``N(x)`` of that family's
partial fraction, evaluated at ``x = 0``.

``N`` lives in the quotient ring ``K[x] / (1 - x**a u)**mult`` with ``K`` the
rational functions in the remaining variables.  Three facts keep everything
as monomials over products of binomials:

* ``x**e`` with ``e = r + a q`` reduces to ``x**r u**-q (1 - Y)**q`` where
  ``Y = 1 - x**a u`` is nilpotent; ``q`` stays symbolic and the residue
  ``r = e mod a`` becomes a congruence guard.
* ``1 / (1 - x**b v)`` is ``sum_{k<N} (x**b v)**k / (1 - w X**beta)`` with
  ``N = a / gcd(a, b)``, ``beta = b / gcd(a, b)``, ``w = v**N u**-beta``;
  the new denominator is a binomial ``1 - w`` up to a nilpotent correction.
* parallel factors ``1 - z**(g p)`` are lifted to a common multiple of
  ``p`` with geometric-sum numerators, so distinct families never share roots.

Every new family reduction is checked against an exact power-series
expansion at random rational points before it is used.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, gcd
from typing import Iterable, Sequence

from .arith import (AffineForm, FactorAtom, GFTerm, Poly, binomial_poly, lcm,
                    monomial_value)

log = logging.getLogger(__name__)

Vec = tuple[int, ...]


class DecompositionError(RuntimeError):
    """A partial-fraction reduction failed its re-summation check (engine bug)."""


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class SystemMatrix:
    """Nonnegative integral ``m x d`` matrix without zero columns."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows or not rows[0]:
            raise MatrixError("matrix must have at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise MatrixError("ragged matrix")
        if any(v < 0 for r in rows for v in r):
            raise MatrixError("matrix entries must be nonnegative")
        for k, col in enumerate(zip(*rows)):
            if not any(col):
                raise MatrixError(f"column {k + 1} is zero")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "SystemMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def d(self) -> int:
        return len(self.rows[0])

    @property
    def columns(self) -> tuple[Vec, ...]:
        return tuple(zip(*self.rows))

    @property
    def row_sums(self) -> Vec:
        return tuple(sum(r) for r in self.rows)

    @property
    def rank(self) -> int:
        return len(self.row_basis()[0])

    def _greedy_basis(self, order: Sequence[int]):
        basis: list[int] = []
        reduced: list[tuple[list[Fraction], dict[int, Fraction], int]] = []
        relations: dict[int, dict[int, Fraction]] = {}
        for j in order:
            vec = [Fraction(v) for v in self.rows[j]]
            combo: dict[int, Fraction] = {}
            for bvec, bcombo, piv in reduced:
                if vec[piv]:
                    f = vec[piv] / bvec[piv]
                    vec = [x - f * y for x, y in zip(vec, bvec)]
                    for i, c in bcombo.items():
                        combo[i] = combo.get(i, 0) + f * c
            if any(vec):
                piv = next(i for i, v in enumerate(vec) if v)
                own = {i: -c for i, c in combo.items()}
                own[j] = Fraction(1)
                reduced.append((vec, own, piv))
                basis.append(j)
            else:
                relations[j] = {i: c for i, c in combo.items() if c}
        return tuple(sorted(basis)), relations

    def row_basis(self, max_candidates: int = 5000) -> tuple[tuple[int, ...], dict[int, dict[int, Fraction]]]:
        """Indices of a maximal independent set of rows and, for every other row,
        its coefficients on those rows.

        Among the possible bases the one with the smallest maximal minors is
        preferred: ``[[2], [1]]`` keeps the row ``[1]``, so the reduced system
        stays unimodular whenever some choice is.
        """
        basis, relations = self._greedy_basis(range(self.m))
        r = len(basis)
        if r == self.m or comb(self.m, r) * comb(self.d, r) > max_candidates:
            return basis, relations
        best = None
        for rows in combinations(range(self.m), r):
            minors = [abs(_det([[self.rows[i][c] for c in cols] for i in rows]))
                      for cols in combinations(range(self.d), r)]
            nonzero = [x for x in minors if x]
            if not nonzero:
                continue
            key = (lcm(*nonzero), max(nonzero), rows)
            if best is None or key < best:
                best = key
        chosen = best[2]
        return self._greedy_basis(list(chosen) + [j for j in range(self.m) if j not in chosen])


def _det(mat: Sequence[Sequence[int]]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


@dataclass(frozen=True)
class SignAtom:
    """The guarded term contributes where ``form <= on_max`` and vanishes where ``form >= off_min``."""

    form: AffineForm
    on_max: int
    off_min: int = 1

    def is_on(self, point) -> bool:
        return self.form(point) < self.off_min


@dataclass(frozen=True, order=True)
class Congruence:
    """``coeffs . p + constant == 0 (mod modulus)``."""

    coeffs: tuple[int, ...]
    constant: int
    modulus: int

    @classmethod
    def make(cls, coeffs, constant, modulus) -> "Congruence | bool":
        coeffs = tuple(int(c) % modulus for c in coeffs)
        constant = int(constant) % modulus
        if not any(coeffs):
            return constant == 0
        return cls(coeffs, constant, modulus)

    def holds(self, point) -> bool:
        return (sum(c * x for c, x in zip(self.coeffs, point)) + self.constant) % self.modulus == 0


@dataclass(frozen=True)
class GuardedTerm:
    term: GFTerm
    signs: tuple[SignAtom, ...] = ()
    congruences: tuple[Congruence, ...] = ()

    def active(self, point) -> bool:
        return all(c.holds(point) for c in self.congruences) and all(s.is_on(point) for s in self.signs)


@dataclass
class EngineStats:
    families_reduced: int = 0
    resummation_checks: int = 0
    terms_created: int = 0


STATS = EngineStats()


# -- parameterizations --------------------------------------------------------

@dataclass(frozen=True)
class SymbolicB:
    """Keep every component of ``b`` symbolic."""


@dataclass(frozen=True)
class Dilation:
    """``b = t * base`` with a single symbolic dilation factor ``t``."""

    base: tuple[int, ...]


def euler_gf(A: SystemMatrix, exponents: Sequence[AffineForm] | None = None) -> GFTerm:
    """``1 / (prod_k (1 - z**c_k) * z**b)`` as a single term.

    Without ``exponents`` the parameters are ``b_1..b_m`` and the numerator
    exponents are ``-b_i``.
    """
    if exponents is None:
        exponents = [AffineForm.param(A.m, i, -1) for i in range(A.m)]
    counts: dict[Vec, int] = {}
    for c in A.columns:
        counts[c] = counts.get(c, 0) + 1
    den = tuple(sorted(FactorAtom.binomial(v, k) for v, k in counts.items()))
    nparams = exponents[0].nparams
    return GFTerm(Poly.const(nparams, 1), tuple(exponents), den)


# -- vector helpers -----------------------------------------------------------

def _vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _vscale(a: Vec, k: int) -> Vec:
    return tuple(k * x for x in a)


def _canonical(v: Vec) -> bool:
    for x in v:
        if x:
            return x > 0
    raise ValueError("zero vector")


def _den_merge(d1: tuple, d2: tuple) -> tuple:
    if not d1:
        return d2
    if not d2:
        return d1
    acc = dict(d1)
    for v, k in d2:
        acc[v] = acc.get(v, 0) + k
    return tuple(sorted(acc.items()))


# -- the quotient ring K[x] / (1 - x^a u)^mult -------------------------------
#
# Scalars of K are dicts  (qvec, cvec, den) -> Poly(q)  meaning
#   sum  poly(q) * z**(q*qvec + cvec) / prod (1 - z**v)**k  over den = ((v, k), ...).
# Ring elements are dicts  (s, k) -> scalar  meaning  sum scalar * x**s * Y**k,
# with 0 <= s < a, 0 <= k < mult and Y = 1 - x**a u.

_ONE_Q = Poly.const(1, 1)


def _kmul(A: dict, B: dict) -> dict:
    out: dict = {}
    for (q1, c1, d1), p1 in A.items():
        for (q2, c2, d2), p2 in B.items():
            key = (_vadd(q1, q2), _vadd(c1, c2), _den_merge(d1, d2))
            v = p1 * p2
            out[key] = out[key] + v if key in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _kadd_into(acc: dict, B: dict, scale=1) -> None:
    for key, p in B.items():
        v = p.scale(scale) if scale != 1 else p
        if key in acc:
            v = acc[key] + v
            if v.is_zero():
                del acc[key]
            else:
                acc[key] = v
        elif not v.is_zero():
            acc[key] = v


def _kshift(A: dict, cshift: Vec, scale=1) -> dict:
    return {(q, _vadd(c, cshift), d): (p.scale(scale) if scale != 1 else p) for (q, c, d), p in A.items()}


class _Ring:
    def __init__(self, a: int, u: Vec, mult: int):
        self.a, self.u, self.mult = a, u, mult
        self.zero = tuple(0 for _ in u)
        self.neg_u = _vscale(u, -1)

    def scalar(self, coeff, cvec=None, den=(), qvec=None, poly=None) -> dict:
        key = (qvec or self.zero, cvec or self.zero, den)
        p = poly if poly is not None else Poly.const(1, coeff)
        return {key: p} if not p.is_zero() else {}

    def add_into(self, acc: dict, B: dict) -> None:
        for sk, kel in B.items():
            cur = acc.setdefault(sk, {})
            _kadd_into(cur, kel)
            if not cur:
                del acc[sk]

    def mul(self, A: dict, B: dict) -> dict:
        a, mult = self.a, self.mult
        out: dict = {}
        for (s1, k1), c1 in A.items():
            for (s2, k2), c2 in B.items():
                k = k1 + k2
                if k >= mult:
                    continue
                prod = _kmul(c1, c2)
                if not prod:
                    continue
                s = s1 + s2
                if s >= a:
                    # x^a = u^-1 X = u^-1 (1 - Y)
                    s -= a
                    prod = _kshift(prod, self.neg_u)
                    self.add_into(out, {(s, k): prod})
                    if k + 1 < mult:
                        self.add_into(out, {(s, k + 1): _kshift(prod, self.zero, -1)})
                else:
                    self.add_into(out, {(s, k): prod})
        return out

    def one_minus_y_power(self, t: int, kel: dict, s: int = 0) -> dict:
        """``kel * x**s * (1 - Y)**t`` truncated at ``Y**mult`` (``t >= 0``)."""
        out: dict = {}
        for j in range(min(t, self.mult - 1) + 1):
            c = Fraction((-1) ** j * _binom(t, j))
            if c:
                self.add_into(out, {(s, j): _kshift(kel, self.zero, c)})
        return out

    def inverse_binomial(self, b: int, v: Vec) -> dict:
        """``1 / (1 - x**b * v)`` for ``b >= 1`` (``v`` not parallel to ``(a, u)``)."""
        a, u, mult = self.a, self.u, self.mult
        g = gcd(a, b)
        N, beta = a // g, b // g
        w = _vadd(_vscale(v, N), _vscale(u, -beta))
        if not any(w):
            raise DecompositionError(f"coincident pole families x^{a}*{u} and x^{b}*{v}")
        # numerator: sum_{k<N} x^{bk} v^k, with x^{bk} = x^s u^-t (1 - Y)^t
        geo: dict = {}
        for k in range(N):
            t, s = divmod(b * k, a)
            kel = self.scalar(1, cvec=_vadd(_vscale(v, k), _vscale(u, -t)))
            self.add_into(geo, self.one_minus_y_power(t, kel, s))
        # 1 / (1 - w (1-Y)^beta) = 1/(1-w) * sum_j (-w/(1-w))^j Z^j,  Z = 1 - (1-Y)^beta
        z_poly = [Fraction(0)] * mult
        for j in range(1, mult):
            z_poly[j] = Fraction(-((-1) ** j) * _binom(beta, j))
        zpow = [Fraction(1)] + [Fraction(0)] * (mult - 1)
        series: dict = {}
        for j in range(mult):
            sign, shift, wv = 1, _vscale(w, j), w
            if not _canonical(w):
                # 1/(1 - z^w)^(j+1) = (-1)^(j+1) z^(-(j+1) w) / (1 - z^-w)^(j+1)
                sign = (-1) ** (j + 1)
                shift = _vadd(shift, _vscale(w, -(j + 1)))
                wv = _vscale(w, -1)
            den = ((wv, j + 1),)
            for k in range(mult):
                if zpow[k]:
                    coeff = sign * (-1) ** j * zpow[k]
                    self.add_into(series, {(0, k): self.scalar(coeff, cvec=shift, den=den)})
            zpow = _ypoly_mul(zpow, z_poly, mult)
        return self.mul(geo, series)


def _ypoly_mul(p: list, q: list, mult: int) -> list:
    out = [Fraction(0)] * mult
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if i + j < mult and b:
                    out[i + j] += a * b
    return out


def _binom(t: int, j: int) -> int:
    out = 1
    for i in range(j):
        out = out * (t - i) // (i + 1)
    return out


Family = tuple[int, Vec, int]  # (a, u, mult): the factor (1 - x^a u)^mult


@lru_cache(maxsize=None)
def family_constant_term(families: tuple[Family, ...], i: int, r: int, x: int) -> tuple:
    """Contribution of family ``i`` to ``CT_x x**(r + a q) / prod(families)``.

    Returns pieces ``(poly_q, qvec, cvec, den)``; their sum is ``N_i(0)`` as a
    rational function of the other variables with ``q`` symbolic.  Valid for
    every integer ``q`` with ``r + a q <= deg - 1``.
    """
    pieces = _family_pieces(families, i, r)
    verify_families(families, x)
    return pieces


@lru_cache(maxsize=None)
def _family_pieces(families, i, r):
    a, u, mult = families[i]
    ring = _Ring(a, u, mult)
    elem: dict = {}
    neg_u = _vscale(u, -1)
    for k in range(mult):
        poly = binomial_poly(k).scale((-1) ** k)
        ring.add_into(elem, {(r, k): ring.scalar(None, qvec=neg_u, poly=poly)})
    for j, (b, v, mj) in enumerate(families):
        if j == i:
            continue
        inv = ring.inverse_binomial(b, v)
        for _ in range(mj):
            elem = ring.mul(elem, inv)
    total: dict = {}
    for (s, k), kel in elem.items():
        if s == 0:
            _kadd_into(total, kel)
    STATS.families_reduced += 1
    return tuple(sorted(((p, q, c, d) for (q, c, d), p in total.items()),
                        key=lambda t: (t[1], t[2], t[3])))


def _random_point(nvars: int, rng: random.Random, skip: int) -> list[Fraction]:
    out = []
    for j in range(nvars):
        if j == skip:
            out.append(Fraction(0))
            continue
        p = rng.choice([2, 3, 5, 7, 11, 13])
        q = rng.choice([3, 4, 5, 7, 9, 11, 17])
        out.append(Fraction(rng.choice([-1, 1]) * p, q))
    return out


@lru_cache(maxsize=None)
def verify_families(families: tuple[Family, ...], x: int, npoints: int = 20) -> int:
    """Re-summation check of the reductions for one set of pole families.

    At random rational values of the other variables the term is a power
    series in ``x``; the sum over families of the reduced contributions must
    equal its exact coefficient, both for ``e <= 0`` and in the overlap
    ``0 < e < deg`` where it vanishes.  Returns the number of points checked.
    """
    rng = random.Random(repr(families))
    deg = sum(f[0] * f[2] for f in families)
    nvars = len(families[0][1])
    period = lcm(*(f[0] for f in families))
    checked = attempts = 0
    while checked < npoints and attempts < 10 * npoints:
        attempts += 1
        pt = _random_point(nvars, rng, x)
        e = rng.randint(-3 * period - 2, deg - 1)
        try:
            total = Fraction(0)
            for fi, (fa, _, _) in enumerate(families):
                fq, fr = divmod(e, fa)
                total += _pieces_value(_family_pieces(families, fi, fr), fq, pt)
        except ZeroDivisionError:
            continue
        expected = _series_ct(families, e, pt)
        STATS.resummation_checks += 1
        if total != expected:
            raise DecompositionError(
                f"re-summation mismatch for pole families {families} at e = {e}: "
                f"{total} != {expected}")
        checked += 1
    if checked < npoints:
        raise DecompositionError(f"no usable evaluation points for {families}")
    return checked


def _pieces_value(pieces, q: int, pt) -> Fraction:
    total = Fraction(0)
    for poly, qvec, cvec, den in pieces:
        val = poly((q,))
        if not val:
            continue
        val *= monomial_value(_vadd(_vscale(qvec, q), cvec), pt)
        for v, k in den:
            d = 1 - monomial_value(v, pt)
            if d == 0:
                raise ZeroDivisionError
            val /= d ** k
        total += val
    return total


def _series_ct(families, e: int, pt) -> Fraction:
    """``[x**-e] prod 1/(1 - c x**a)**mult`` with ``c = z**u`` evaluated at ``pt``."""
    n = -e
    if n < 0:
        return Fraction(0)
    coef = [Fraction(0)] * (n + 1)
    coef[0] = Fraction(1)
    for a, u, mult in families:
        c = monomial_value(u, pt)
        for _ in range(mult):
            for k in range(a, n + 1):
                coef[k] += c * coef[k - a]
    return coef[n]


# -- one elimination step -------------------------------------------------------

def _orient_and_lift(term: GFTerm, x: int):
    """Orient ``x``-factors to positive ``x``-exponent and lift parallel ones.

    Returns ``(numerator, families, rest)``: ``numerator`` maps a monomial
    shift to an integer coefficient, ``families`` is the sorted tuple of
    ``(a, u, mult)`` and ``rest`` the ``x``-free factors.
    """
    nv = term.nvars
    zero = (0,) * nv
    sign, shift = 1, zero
    xf: dict[Vec, int] = {}
    rest = []
    for f in term.denominator:
        v, k = f.vector, f.multiplicity
        if v[x] == 0:
            rest.append(f)
            continue
        if v[x] < 0:
            sign *= (-1) ** k
            shift = _vadd(shift, _vscale(v, -k))
            v = _vscale(v, -1)
        xf[v] = xf.get(v, 0) + k
    groups: dict[Vec, list[tuple[int, int]]] = {}
    for v, k in xf.items():
        g = 0
        for c in v:
            g = gcd(g, c)
        groups.setdefault(tuple(c // g for c in v), []).append((g, k))
    numer = {shift: sign}
    families = []
    for p, lst in groups.items():
        L = lcm(*(g for g, _ in lst))
        total = 0
        for g, k in lst:
            total += k
            if g != L:
                geo = [_vscale(p, j * g) for j in range(L // g)]
                for _ in range(k):
                    new: dict[Vec, int] = {}
                    for s, c in numer.items():
                        for gv in geo:
                            key = _vadd(s, gv)
                            new[key] = new.get(key, 0) + c
                    numer = {s: c for s, c in new.items() if c}
        big = _vscale(p, L)
        u = tuple(0 if j == x else c for j, c in enumerate(big))
        families.append((big[x], u, total))
    return numer, tuple(sorted(families)), tuple(rest)


def _affine_from_vec_q(qvec: Vec, cvec: Vec, j: int, q_form: AffineForm) -> AffineForm:
    out = q_form.scale(qvec[j]) if qvec[j] else AffineForm.zero(q_form.nparams)
    return out + cvec[j] if cvec[j] else out


def _congruence_for(e: AffineForm, r: int, a: int) -> Congruence | bool:
    """Guard ``e == r (mod a)`` for an affine form with rational coefficients."""
    coeffs, const, D = e.integral()
    return Congruence.make(coeffs, const - D * r, D * a)


def pf_decompose(gt: GuardedTerm, x: int) -> list[GuardedTerm]:
    """The ``x``-constant term of one guarded term, as guarded terms free of ``x``."""
    term = gt.term
    nv = term.nvars
    nparams = term.coefficient.nvars
    numer, families, rest = _orient_and_lift(term, x)
    rest_den = tuple((f.vector, f.multiplicity) for f in rest)
    out: list[GuardedTerm] = []
    zero_form = AffineForm.zero(nparams)
    deg = sum(a * k for a, _, k in families)
    for nshift, ncoef in numer.items():
        exps = [e + s if s else e for e, s in zip(term.exponents, nshift)]
        e = exps[x]
        coeff = term.coefficient.scale(ncoef)
        if not families:
            # CT of c * x^e is c when e == 0
            signs = gt.signs
            if e.is_constant():
                if e.constant != 0:
                    continue
            else:
                signs = signs + (SignAtom(e, 0, 1), SignAtom(-e, 0, 1))
            exps[x] = zero_form
            out.append(GuardedTerm(GFTerm(coeff, tuple(exps), term.denominator), signs, gt.congruences))
            continue
        signs = gt.signs
        if e.is_constant():
            if e.constant >= 1:
                continue
        else:
            signs = signs + (SignAtom(e, deg - 1, 1),)
        for i, (a, u, mult) in enumerate(families):
            if e.is_constant():
                rlist = [int(e.constant) % a]
            else:
                rlist = range(a)
            for r in rlist:
                congs = gt.congruences
                if not e.is_constant() and a > 1:
                    c = _congruence_for(e, r, a)
                    if c is False:
                        continue
                    if c is not True:
                        congs = tuple(sorted(set(congs) | {c}))
                q_form = (e - r).scale(Fraction(1, a))
                pieces = family_constant_term(families, i, r, x)
                for poly, qvec, cvec, den in pieces:
                    new_exps = tuple(
                        zero_form if j == x else exps[j] + _affine_from_vec_q(qvec, cvec, j, q_form)
                        for j in range(nv))
                    c_poly = coeff * poly.substitute([q_form])
                    if c_poly.is_zero():
                        continue
                    full_den = _den_merge(tuple(sorted(rest_den)), den)
                    atoms = tuple(FactorAtom.binomial(v, k) for v, k in full_den)
                    out.append(GuardedTerm(GFTerm(c_poly, new_exps, atoms), signs, congs))
    STATS.terms_created += len(out)
    return out


def combine(terms: Iterable[GuardedTerm]) -> list[GuardedTerm]:
    """Merge guarded terms that differ only in their coefficient."""
    acc: dict = {}
    order = []
    for gt in terms:
        key = (gt.term.exponents, gt.term.denominator, gt.signs, gt.congruences)
        if key in acc:
            acc[key] = acc[key] + gt.term.coefficient
        else:
            acc[key] = gt.term.coefficient
            order.append(key)
    out = []
    for key in order:
        c = acc[key]
        if not c.is_zero():
            exps, den, signs, congs = key
            out.append(GuardedTerm(GFTerm(c, exps, den), signs, congs))
    return out


def eliminate_variable(expr: Sequence[GuardedTerm], x: int) -> list[GuardedTerm]:
    """Replace every term by its constant term in ``z_x``."""
    out: list[GuardedTerm] = []
    for gt in expr:
        out.extend(pf_decompose(gt, x))
    return combine(out)


def choose_variable(expr: Sequence[GuardedTerm], candidates: Sequence[int]) -> int:
    """Variable with fewest denominator factors, then smallest total degree."""
    def cost(x):
        nfac = sum(f.multiplicity for gt in expr for f in gt.term.denominator if f.vector[x])
        deg = sum(abs(f.vector[x]) * f.multiplicity for gt in expr for f in gt.term.denominator)
        return (nfac, deg, x)
    return min(candidates, key=cost)


@dataclass
class Elimination:
    """Result of :func:`run_elimination`: univariate guarded terms in ``last``."""

    matrix: SystemMatrix
    rows: tuple[int, ...]
    relations: dict[int, dict[int, Fraction]]
    parameter_names: tuple[str, ...]
    order: tuple[int, ...]
    last: int
    terms: list[GuardedTerm] = field(default_factory=list)


def parameter_names(m: int) -> tuple[str, ...]:
    if m == 1:
        return ("b",)
    if m <= 3:
        return ("a", "b", "c")[:m]
    return tuple(f"b{i + 1}" for i in range(m))


def run_elimination(A: SystemMatrix, parameterization=SymbolicB(), order: str = "auto") -> Elimination:
    """Eliminate all but one variable of Euler's generating function.

    Dependent rows are dropped first (they only impose linear equalities on
    ``b``), so the engine always sees a matrix of full row rank.  With
    ``order="paper"`` variables go from last to first (the worked example
    keeps ``z_1``); ``"forward"`` eliminates ``z_1, z_2, ...``.
    """
    basis, relations = A.row_basis()
    sub = SystemMatrix(tuple(A.rows[i] for i in basis))
    k = sub.m
    if isinstance(parameterization, Dilation):
        base = tuple(int(v) for v in parameterization.base)
        if len(base) != A.m:
            raise MatrixError(f"rhs has {len(base)} entries, expected {A.m}")
        for j, combo in relations.items():
            if sum(c * base[i] for i, c in combo.items()) != base[j]:
                raise MatrixError("rhs is not in the row-dependency subspace of the matrix")
        exps = [AffineForm.param(1, 0, -base[i]) for i in basis]
        names = ("t",)
    else:
        exps = [AffineForm.param(k, i, -1) for i in range(k)]
        names = parameter_names(A.m)
    expr = [GuardedTerm(euler_gf(sub, exps))]
    remaining = list(range(k))
    chosen = []
    for _ in range(k - 1):
        if order == "paper":
            x = remaining[-1]
        elif order == "forward":
            x = remaining[0]
        elif order == "auto":
            x = choose_variable(expr, remaining)
        else:
            raise ValueError(f"unknown elimination order {order!r}")
        expr = eliminate_variable(expr, x)
        remaining.remove(x)
        chosen.append(x)
        log.debug("eliminated z%d: %d terms", x + 1, len(expr))
    return Elimination(A, basis, relations, names, tuple(chosen), remaining[0], expr)
