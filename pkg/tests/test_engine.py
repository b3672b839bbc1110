from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vpf import engine
from vpf.arith import AffineForm, FactorAtom, GFTerm, Poly, expr_eval
from vpf.engine import (STATS, DecompositionError, Dilation, GuardedTerm, MatrixError, SystemMatrix,
                        euler_gf, pf_decompose, run_elimination)
from vpf.final import finalize
from vpf.oracle import brute_count

M4 = SystemMatrix.of([[1, 2, 1, 0], [1, 1, 0, 1]])


def test_euler_gf_worked_example():
    t = euler_gf(M4)
    assert sorted(f.vector for f in t.denominator) == [(0, 1), (1, 0), (1, 1), (2, 1)]
    assert all(f.multiplicity == 1 for f in t.denominator)
    assert t.exponents == (AffineForm.param(2, 0, -1), AffineForm.param(2, 1, -1))


def test_euler_gf_single_column():
    t = euler_gf(SystemMatrix.of([[1]]))
    assert [f.vector for f in t.denominator] == [(1,)]
    assert t.exponents == (AffineForm.param(1, 0, -1),)


def test_euler_gf_repeated_columns_merge():
    t = euler_gf(SystemMatrix.of([[1, 2, 1]]))
    assert sorted((f.vector, f.multiplicity) for f in t.denominator) == [((1,), 2), ((2,), 1)]


@pytest.mark.parametrize("rows", [[], [[]], [[1, 2], [1]], [[1, -1]], [[0, 1], [0, 2]]])
def test_matrix_validation(rows):
    with pytest.raises(MatrixError):
        SystemMatrix.of(rows)


def _shape(gt):
    t = gt.term
    exp = t.exponents[0]
    return (t.coefficient.constant_value(), tuple(exp.coeffs), exp.constant,
            tuple(sorted((f.vector[0], f.multiplicity) for f in t.denominator)))


def test_worked_example_three_terms():
    el = run_elimination(M4, order="paper")
    assert el.order == (1,) and el.last == 0
    shapes = sorted(_shape(gt) for gt in el.terms)
    assert shapes == sorted([
        (-1, (-1, 1), 1, ((1, 3),)),
        (1, (-1, 2), 3, ((1, 2), (2, 1))),
        (1, (-1, 0), 0, ((1, 2), (2, 1))),
    ])


def test_dilation_substitutes_parameters():
    el = run_elimination(M4, Dilation((5, 4)), order="paper")
    shapes = sorted(_shape(gt) for gt in el.terms)
    assert shapes == sorted([
        (-1, (-1,), 1, ((1, 3),)),
        (1, (3,), 3, ((1, 2), (2, 1))),
        (1, (-5,), 0, ((1, 2), (2, 1))),
    ])


def test_single_row_is_unchanged():
    A = SystemMatrix.of([[1, 2, 3]])
    el = run_elimination(A)
    assert el.order == () and len(el.terms) == 1
    assert el.terms[0].term == euler_gf(A)


def test_constant_term_of_geometric_series():
    # CT_w 1 / ((1 - w) w^b) = 1 for b >= 0
    gt = GuardedTerm(GFTerm(Poly.const(1, 1), (AffineForm.param(1, 0, -1),), (FactorAtom.binomial((1,)),)))
    out = pf_decompose(gt, 0)
    for b in range(-5, 10):
        total = sum(g.term.coefficient((b,)) for g in out if g.active((b,)))
        assert total == (1 if b >= 0 else 0)


def test_constant_term_analytic_at_zero():
    # CT_z 1 / ((1 - z w)(1 - z)) = 1
    zero = AffineForm.zero(0)
    gt = GuardedTerm(GFTerm(Poly.const(0, 1), (zero, zero),
                            (FactorAtom.binomial((1, 1)), FactorAtom.binomial((1, 0)))))
    out = pf_decompose(gt, 0)
    for w in (Fraction(1, 3), Fraction(-5, 7), Fraction(2)):
        assert expr_eval([g.term for g in out], [Fraction(0), w], ()) == 1


def test_constant_term_with_pole_at_zero():
    # 1 / ((1 - z) z) = 1/z + 1/(1 - z): constant term 1
    gt = GuardedTerm(GFTerm(Poly.const(0, 1), (AffineForm.constant_form(0, -1),),
                            (FactorAtom.binomial((1,)),)))
    out = pf_decompose(gt, 0)
    assert sum(g.term.coefficient(()) for g in out) == 1


def test_row_basis_prefers_small_minors():
    basis, relations = SystemMatrix.of([[2], [1]]).row_basis()
    assert basis == (1,)
    assert relations == {0: {1: Fraction(2)}}
    assert SystemMatrix.of([[1, 2], [2, 4], [0, 1]]).rank == 2


def test_resummation_checks_are_counted():
    engine.verify_families.cache_clear()
    engine.family_constant_term.cache_clear()
    engine._family_pieces.cache_clear()
    before = STATS.resummation_checks
    run_elimination(M4)
    assert STATS.resummation_checks - before == 20 * engine.verify_families.cache_info().currsize > 0


def test_resummation_mismatch_is_detected(monkeypatch):
    engine.verify_families.cache_clear()
    engine.family_constant_term.cache_clear()
    real = engine._series_ct
    monkeypatch.setattr(engine, "_series_ct", lambda fam, e, pt: real(fam, e, pt) + 1)
    with pytest.raises(DecompositionError):
        run_elimination(M4)
    engine.verify_families.cache_clear()
    engine.family_constant_term.cache_clear()


def test_unknown_order_rejected():
    with pytest.raises(ValueError):
        run_elimination(M4, order="sideways")


matrices = st.integers(1, 3).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda d: st.lists(st.lists(st.integers(0, 3), min_size=d, max_size=d), min_size=m, max_size=m)
)).filter(lambda rows: all(any(c) for c in zip(*rows)))


@settings(max_examples=40, deadline=None)
@given(matrices, st.data(), st.sampled_from(["auto", "paper", "forward"]))
def test_leaves_sum_to_count(rows, data, order):
    A = SystemMatrix.of(rows)
    el = run_elimination(A, order=order)
    leaves = finalize(el)
    for _ in range(5):
        b = data.draw(st.lists(st.integers(0, 12), min_size=A.m, max_size=A.m))
        if A.rank < A.m and brute_count(A, b) == 0:
            continue
        # leaves are functions of the kept rows of b
        kept = [b[i] for i in el.rows]
        assert sum(leaf.value(kept) for leaf in leaves) == brute_count(A, b)
