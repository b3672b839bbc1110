import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vpf.arith import AffineForm, Poly
from vpf.chambers import symbolic
from vpf.quasipoly import (GE0, CaseConstraint, Piece, PiecewiseQP, QuasiPolynomial, from_json,
                           qp_add, qp_compose_affine, qp_eval, qp_render, qp_scale, reciprocity_transform,
                           render_qp, to_json)

F = Fraction


def qp1(name, period, rows):
    """Univariate QP from ``{residue: {power: coeff}}``."""
    return QuasiPolynomial.from_coeffs((name,), (period,), {
        ((r,), (k,)): F(c) for r, terms in rows.items() for k, c in terms.items()})


OSC = {0: 1, 1: F(3, 4)}  # (7 + (-1)^x)/8


def ehrhart_lq():
    return qp1("t", 2, {r: {2: F(23, 4), 1: F(9, 2), 0: OSC[r]} for r in (0, 1)})


def qp2(period, fn):
    """Bivariate (a, b) QP from ``fn(ra, rb) -> {(i, j): coeff}``."""
    coeffs = {}
    for ra in range(period[0]):
        for rb in range(period[1]):
            for e, c in fn(ra, rb).items():
                coeffs[((ra, rb), e)] = F(c)
    return QuasiPolynomial.from_coeffs(("a", "b"), period, coeffs)


def test_eval_ehrhart_values():
    q = ehrhart_lq()
    assert qp_eval(q, (1,)) == 11
    assert qp_eval(q, (2,)) == 33
    assert q((-1,)) == 2


def test_zero():
    z = QuasiPolynomial.zero(("a", "b"))
    assert z((3, -7)) == 0
    assert render_qp(z) == "0"


def test_worked_example_sum_simplifies():
    first = qp2((2, 1), lambda ra, rb: {(2, 0): F(1, 4), (1, 0): 1, (0, 0): OSC[ra]})
    # -(a-b)^2/2 - (a-b)/2 + (a-2b)^2/4 + (2b-a)/2 + (1 + (-1)^(a+1))/8
    second = qp2((2, 1), lambda ra, rb: {
        (2, 0): F(-1, 2) + F(1, 4), (1, 1): 1 - 1, (0, 2): F(-1, 2) + 1,
        (1, 0): F(-1, 2) - F(1, 2), (0, 1): F(1, 2) + 1, (0, 0): F(1 - (-1) ** ra, 8)})
    total = qp_add(first, second).minimize()
    assert total.period == (1, 1)
    assert render_qp(total) == "b^2/2 + 3*b/2 + 1"


def test_add_identity_and_cancellation():
    q = ehrhart_lq()
    assert qp_add(q, QuasiPolynomial.zero(("t",))) == q
    assert qp_add(q, qp_scale(q, -1)).is_zero()


def test_compose_square():
    sq = QuasiPolynomial.polynomial(("n",), Poly(1, {(2,): F(1)}))
    out = qp_compose_affine(sq, [AffineForm.make([2], 1)], ("t",))
    assert out == QuasiPolynomial.polynomial(("t",), Poly(1, {(2,): F(4), (1,): F(4), (0,): F(1)}))


def test_compose_even_argument_kills_oscillation():
    osc = qp1("a", 2, {r: {0: OSC[r]} for r in (0, 1)})
    out = qp_compose_affine(osc, [AffineForm.make([2], 0)], ("t",)).minimize()
    assert out.period == (1,) and out((5,)) == 1


def test_compose_middle_chamber_gives_ehrhart():
    middle = qp2((2, 1), lambda ra, rb: {(2, 0): F(-1, 4), (1, 1): 1, (0, 2): F(-1, 2),
                                         (1, 0): F(1, 2), (0, 1): F(1, 2), (0, 0): OSC[ra]})
    out = qp_compose_affine(middle, [AffineForm.make([5], 0), AffineForm.make([4], 0)], ("t",))
    assert out == ehrhart_lq()


def test_compose_needs_integer_forms():
    q = ehrhart_lq()
    with pytest.raises(ValueError):
        qp_compose_affine(q, [AffineForm.make([F(1, 2)], 0)])


def test_negative_arguments_use_floored_residues():
    q = qp1("n", 3, {0: {0: 1}, 1: {0: 2}, 2: {0: 3}})
    assert [q((n,)) for n in (-1, -2, -3, -4)] == [3, 2, 1, 3]


def test_minimize_and_lift():
    q = ehrhart_lq()
    lifted = q.lift((6,))
    assert lifted.period == (6,) and lifted == q
    assert lifted.minimize().period == (2,)


def test_render_examples():
    third = QuasiPolynomial.polynomial(("a", "b"), Poly(2, {(0, 2): F(1, 2), (0, 1): F(3, 2), (0, 0): F(1)}))
    assert render_qp(third) == "b^2/2 + 3*b/2 + 1"
    osc = qp1("a", 2, {r: {0: OSC[r]} for r in (0, 1)})
    assert render_qp(osc) == "(7 + (-1)^a)/8"
    assert render_qp(ehrhart_lq()) == "23*t^2/4 + 9*t/2 + (7 + (-1)^t)/8"


def test_reciprocity_first_piece_is_self_paired():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]])
    rt = reciprocity_transform(pw)
    first = next(i for i, p in enumerate(pw.pieces) if p.qp((0, 5)) == 1 and p.qp((2, 5)) == 4)
    assert rt.pieces[first].qp == pw.pieces[first].qp
    # the constraints move with the substitution b -> -b - r
    assert rt.pieces[first].contains((-4, -3))


def test_piecewise_disagreement_raises():
    one = QuasiPolynomial.polynomial(("b",), Poly.const(1, 1))
    two = QuasiPolynomial.polynomial(("b",), Poly.const(1, 2))
    pw = PiecewiseQP(("b",), [Piece((CaseConstraint(GE0, (1,), 0),), one),
                              Piece((CaseConstraint(GE0, (1,), 0),), two)])
    with pytest.raises(ValueError):
        pw((3,))
    assert pw((-1,)) == 0


def test_constraint_validation_and_rendering():
    with pytest.raises(ValueError):
        CaseConstraint("between", (1,))
    with pytest.raises(ValueError):
        CaseConstraint("congruence", (1,), 0, 2, 5)
    c = CaseConstraint(GE0, (-1, 2), 2)
    assert c.render(("a", "b")) == "-a + 2*b + 2 >= 0"
    assert c.holds((4, 1)) and not c.holds((5, 1))


def test_json_round_trip_is_byte_identical():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]])
    text = to_json(pw)
    again = to_json(from_json(text))
    assert text == again
    doc = json.loads(text)
    assert doc["version"] == "vpf-1" and doc["kind"] == "piecewise"
    single = to_json(ehrhart_lq())
    assert from_json(single) == ehrhart_lq()
    assert to_json(from_json(single)) == single


def test_json_rejects_unknown_version():
    doc = json.loads(to_json(ehrhart_lq()))
    doc["version"] = "vpf-0"
    with pytest.raises(ValueError):
        from_json(json.dumps(doc))


def test_text_render_of_pieces():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]])
    lines = qp_render(pw).splitlines()
    assert "b^2/2 + 3*b/2 + 1    if b >= 0, a - 2*b >= 0" in lines
    with pytest.raises(ValueError):
        qp_render(pw, "xml")


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def univariate_qps(draw):
    period = draw(st.integers(1, 4))
    rows = {r: {k: draw(coeff) for k in range(draw(st.integers(0, 3)))} for r in range(period)}
    return qp1("n", period, rows)


@settings(max_examples=50, deadline=None)
@given(univariate_qps(), univariate_qps(), st.integers(-40, 40))
def test_algebra_is_pointwise(p, q, n):
    assert qp_add(p, q)((n,)) == p((n,)) + q((n,))
    assert qp_scale(p, F(-2, 3))((n,)) == F(-2, 3) * p((n,))
    assert p.minimize()((n,)) == p((n,))


@settings(max_examples=50, deadline=None)
@given(univariate_qps(), st.integers(-3, 3).filter(bool), st.integers(-5, 5), st.integers(-20, 20))
def test_compose_is_pointwise(p, c, k, t):
    out = qp_compose_affine(p, [AffineForm.make([c], k)], ("t",))
    assert out((t,)) == p((c * t + k,))
