import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vpf.arith import AffineForm, FactorAtom, GFTerm, Poly, ResourceLimitError, series_coefficients
from vpf.chambers import symbolic
from vpf.engine import GuardedTerm, SystemMatrix
from vpf.final import (FinalLeaf, InterpolationError, LeafSum, const_term_leaf, denumerant_qp,
                       partition_count, qp_from_samples)
from vpf.quasipoly import QuasiPolynomial, qp_compose_affine, qp_scale


def test_denumerant_one_two():
    qp, corr = denumerant_qp([(1, 1), (2, 1)])
    assert corr == {}
    assert qp((4,)) == 3
    assert all(qp((n,)) == n // 2 + 1 for n in range(60))
    assert qp.period == (2,)


def test_denumerant_triple_one():
    qp, _ = denumerant_qp([(1, 3)])
    assert qp.period == (1,)
    assert all(qp((n,)) == Fraction((n + 2) * (n + 1), 2) for n in range(30))


def test_denumerant_improper_numerator():
    qp, corr = denumerant_qp([(1, 1)], numerator=[0, 0, 0, 1])
    assert all(qp((n,)) == 1 for n in range(10))
    assert corr == {0: -1, 1: -1, 2: -1}


def test_qp_from_samples_floor():
    qp = qp_from_samples({0: 1, 1: 1, 2: 2, 3: 2, 4: 3, 5: 3}, 1, 2)
    assert all(qp((n,)) == n // 2 + 1 for n in range(-10, 40))


def test_qp_from_samples_constant_and_square():
    assert qp_from_samples({0: 1, 1: 1}, 0, 1) == QuasiPolynomial.polynomial(("n",), Poly.const(1, 1))
    sq = qp_from_samples({0: 0, 1: 1, 2: 4, 3: 9}, 2, 1)
    assert sq == QuasiPolynomial.polynomial(("n",), Poly(1, {(2,): Fraction(1)}))


def test_qp_from_samples_needs_enough_points():
    with pytest.raises(InterpolationError):
        qp_from_samples({0: 1, 2: 2}, 1, 2)


def test_qp_from_samples_rejects_inconsistent_extra_sample():
    with pytest.raises(InterpolationError):
        qp_from_samples({0: 0, 1: 1, 2: 4, 3: 10}, 1, 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 2)), min_size=1, max_size=3))
def test_refit_on_doubled_samples_is_exact(factors):
    qp, _ = denumerant_qp(factors)
    period = qp.period[0]
    k = sum(m for _, m in factors)
    n = 2 * period * (k + 1)
    coeffs = series_coefficients(factors, n)
    again = qp_from_samples(dict(enumerate(coeffs)), max(k - 1, 0), period)
    assert again == qp


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 2)), min_size=1, max_size=3),
       st.integers(-60, 60))
def test_partition_count_matches_quasipolynomial(factors, n):
    qp, _ = denumerant_qp(factors)
    assert partition_count(factors, n) == qp((n,))


def test_partition_count_overlap_zeros():
    # D vanishes for -deg < n < 0 and is continued by reciprocity below
    assert [partition_count([(1, 2), (2, 1)], n) for n in (-1, -2, -3)] == [0, 0, 0]
    assert partition_count([(1, 2), (2, 1)], -4) == partition_count([(1, 2), (2, 1)], 0)


AB = 2


def leaves_value(term, point):
    return sum(leaf.value(point) for leaf in const_term_leaf(GuardedTerm(term), 0))


def test_constant_term_first_shape():
    t = GFTerm(Poly.const(AB, 1), (AffineForm.make([-1, 1], 1),), (FactorAtom.binomial((1,), 3),))
    for a in range(25):
        for b in range(25):
            if b >= a:
                assert leaves_value(t, (a, b)) == 0
            if b <= a + 1:
                leaf = const_term_leaf(GuardedTerm(t), 0)[0]
                assert leaf.qp_value((a, b)) == Fraction((a - b) ** 2, 2) + Fraction(a - b, 2)


def test_constant_term_second_shape():
    t = GFTerm(Poly.const(AB, 1), (AffineForm.make([-1, 2], 3),),
               (FactorAtom.binomial((1,), 2), FactorAtom.binomial((2,), 1)))
    leaf = const_term_leaf(GuardedTerm(t), 0)[0]
    for a in range(25):
        for b in range(25):
            if a <= 2 * b + 2:
                assert leaf.value((a, b)) == 0
            if a >= 2 * b:
                expected = (Fraction((a - 2 * b) ** 2, 4) + Fraction(2 * b - a, 2)
                            + Fraction(1 + (-1) ** (a + 1), 8))
                assert leaf.qp_value((a, b)) == expected


def test_constant_term_always_contributes():
    t = GFTerm(Poly.const(AB, 1), (AffineForm.make([-1, 0], 0),),
               (FactorAtom.binomial((1,), 2), FactorAtom.binomial((2,), 1)))
    for a in range(25):
        assert leaves_value(t, (a, 3)) == Fraction(a * a, 4) + a + Fraction(7 + (-1) ** a, 8)


def test_final_leaf_to_qp_matches_value():
    leaf = FinalLeaf(Poly(2, {(1, 0): Fraction(1, 2)}), AffineForm.make([1, -2], 1), ((2, 1), (3, 1)))
    qp = leaf.to_qp(("a", "b"))
    for a in range(-8, 9):
        for b in range(-8, 9):
            assert qp((a, b)) == leaf.qp_value((a, b))


def test_leafsum_explicit_agrees():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]], max_rows=0)
    for piece in pw.pieces:
        assert isinstance(piece.qp, LeafSum)
        qp = piece.qp.explicit()
        assert qp.degree <= piece.qp.degree
        for a in range(-10, 15):
            for b in range(-10, 15):
                assert qp((a, b)) == piece.qp((a, b))


def test_leafsum_compose_and_scale_are_lazy_but_exact():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]], max_rows=0)
    ls = pw.pieces[1].qp
    subs = [AffineForm.make([-1, 0], -4), AffineForm.make([0, -1], -3)]
    lazy = ls.compose(subs).scale(-3)
    exact = qp_scale(qp_compose_affine(ls.explicit(), subs), -3)
    assert lazy.period == exact.period
    rng = random.Random(0)
    for _ in range(100):
        p = (rng.randint(-30, 30), rng.randint(-30, 30))
        assert lazy(p) == exact(p)
    assert lazy.explicit() == exact


def test_leafsum_limits():
    pw = symbolic([[1, 2, 1, 0], [1, 1, 0, 1]], max_rows=0)
    with pytest.raises(ResourceLimitError):
        pw.pieces[0].qp.explicit(max_rows=1)


def test_leafsum_dilation_period():
    A = SystemMatrix.of([[1, 2, 1, 0], [1, 1, 0, 1]])
    pw = symbolic(A, max_rows=0)
    t = pw.pieces[1].qp.compose([AffineForm.make([5], 0), AffineForm.make([4], 0)], ("t",))
    assert t.explicit().minimize().period == (2,)
    assert [t((k,)) for k in (1, 2)] == [11, 33]
