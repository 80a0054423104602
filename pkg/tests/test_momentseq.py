from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubicmoment.momentseq import (BivSeq, CurveType, affine_apply, affine_inverse, check_relations,
                                   column_relation, index_pairs, kernel_polys, moment_matrix,
                                   monomials, riesz, sequence_from_values)
from cubicmoment.oracle import forward_moments, random_instance
from cubicmoment.ratlinalg import is_psd, rank

from conftest import delta, example, fractions_st

F = Fraction
CURVES = [CurveType.hyp1(), CurveType.hyp2(-1), CurveType.hyp2(F(3, 2)), CurveType.hyp3(2), CurveType.hyp3(F(-1, 3))]


def test_monomial_order_is_degree_lex():
    assert monomials(2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(index_pairs(6)) == 28


def test_moment_matrix_of_origin_atom():
    m = moment_matrix(delta(0, 0)).m
    assert m[0][0] == 1
    assert all(m[i][j] == 0 for i in range(10) for j in range(10) if (i, j) != (0, 0))


def test_moment_matrix_of_unit_atom():
    m = moment_matrix(delta(1, 1)).m
    assert all(x == 1 for row in m for x in row)
    assert rank(m) == 1


def test_moment_matrix_of_two_atoms():
    s = BivSeq.from_function(3, lambda i, j: 1 + (-1) ** (i + j))
    assert s == forward_moments([(1, 1, 1), (-1, -1, 1)], 3)
    m = moment_matrix(s).m
    assert rank(m) == 2 and is_psd(m)


def test_riesz_cases():
    s = example("type2_example")[0]
    assert riesz(s, {(0, 0): F(1)}) == s[(0, 0)]
    assert riesz(s, {(2, 1): F(1)}) == s[(2, 1)]
    assert riesz(delta(1, 0), {(2, 0): F(1), (1, 0): F(-2), (0, 0): F(1)}) == 0


@given(st.lists(fractions_st, min_size=3, max_size=3), st.lists(fractions_st, min_size=3, max_size=3),
       fractions_st)
def test_riesz_is_linear(pc, qc, alpha):
    s = example("type3_example")[0]
    mons = [(0, 0), (2, 1), (1, 3)]
    p = dict(zip(mons, pc))
    q = dict(zip(mons, qc))
    comb = {m: alpha * p[m] + q[m] for m in mons}
    assert riesz(s, comb) == alpha * riesz(s, p) + riesz(s, q)


def test_affine_identity_and_translation():
    s = example("type2_example")[0]
    assert affine_apply(s, 0, 1, 0, 0, 0, 1) == s
    assert affine_apply(delta(0, 0), 1, 1, 0, 1, 0, 1) == delta(1, 1)


def test_affine_rejects_singular_map():
    with pytest.raises(ValueError):
        affine_apply(delta(0, 0), 0, 1, 2, 0, 2, 4)


invertible_maps = st.tuples(*[fractions_st] * 6).filter(lambda t: t[1] * t[5] - t[2] * t[4] != 0)


@given(invertible_maps, st.integers(0, 10_000))
def test_affine_inverse_round_trip(phi, seed):
    s = random_instance(CurveType.hyp1(), 3, 2, 3, seed, height=5).moments
    assert affine_apply(affine_apply(s, *phi), *affine_inverse(*phi)) == s


@given(invertible_maps, st.integers(0, 10_000))
def test_affine_preserves_rank(phi, seed):
    s = random_instance(CurveType.hyp3(2), 3, 1, 4, seed, height=5).moments
    assert rank(moment_matrix(affine_apply(s, *phi)).m) == rank(moment_matrix(s).m)


def test_check_relations_cases():
    for curve in CURVES:
        assert check_relations(random_instance(curve, 3, 2, 4, 11).moments, curve).ok
    s = BivSeq.from_function(3, lambda i, j: F(2) if (i, j) == (1, 2) else F(1))
    rel = check_relations(s, CurveType.hyp1())
    assert not rel.ok and rel.violations[0][0] == (0, 0)


def test_check_relations_on_worked_type1_example():
    s, curve = example("type1_indefinite")
    assert check_relations(s, curve).ok


def test_column_relation_cases():
    assert all(v == 0 for v in column_relation(delta(1, 1), {(1, 0): F(1), (0, 0): F(-1)}))
    s3 = example("type3_example")[0]
    assert all(v == 0 for v in column_relation(s3, {(0, 2): F(2), (2, 1): F(1), (0, 3): F(-1)}))
    s1 = example("type1_indefinite")[0]
    assert all(v == 0 for v in column_relation(s1, {(1, 2): F(1), (0, 1): F(-1)}))


@given(st.sampled_from(CURVES), st.integers(0, 10_000))
def test_curve_atoms_give_column_relations(curve, seed):
    # supp(mu) in Z(p) with deg p <= k forces p(X, Y) = 0 in M(k)
    gt = random_instance(curve, 3, 2, 5, seed, height=6)
    assert all(v == 0 for v in column_relation(gt.moments, curve.cubic()))


def test_restrict_cases():
    s = example("type2_example")[0]
    mm = moment_matrix(s)
    assert mm.restrict(list(mm.basis)) == mm.m
    assert mm.restrict([(0, 0)]) == [[s[(0, 0)]]]
    b = [(0, 3), (0, 2), (0, 1), (0, 0), (1, 0), (2, 0), (3, 0)]
    ones = moment_matrix(delta(1, 1)).restrict(b)
    assert ones == [[1] * 7 for _ in range(7)]


def test_kernel_polys_of_worked_type3_example():
    s = example("type3_example")[0]
    ker = kernel_polys(moment_matrix(s))
    assert len(ker) == 1
    p = ker[0]
    scale = p[(0, 2)] / 2
    assert {m: c / scale for m, c in p.items()} == {(0, 2): 2, (2, 1): 1, (0, 3): -1}


def test_sequence_from_values_round_trip():
    s = example("type1_corrected")[0]
    assert sequence_from_values(3, s.values()) == s
