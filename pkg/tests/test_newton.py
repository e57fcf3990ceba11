from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import given, settings

from oracles import in_hull_2d
from ratsos.newton import (
    Membership,
    Separation,
    basis_key,
    candidate_box,
    check_membership,
    check_separation,
    exact_hull_membership,
    newton_half_support,
    recheck,
)
from ratsos.parse import parse_poly
from ratsos.poly import MPoly

BIVARIATE = "4*X1^4 + 4*X1^3*X2 - 7*X1^2*X2^2 - 2*X1*X2^3 + 10*X2^4"


def test_bivariate_quartic_half_support():
    f = parse_poly(BIVARIATE)
    Q = newton_half_support(f)
    assert Q.points == ((2, 0), (1, 1), (0, 2))
    assert recheck(Q, f)


def test_known_half_supports():
    assert newton_half_support(parse_poly("X1^2 + X2^2")).points == ((1, 0), (0, 1))
    assert len(newton_half_support(parse_poly("1 + X1^4 + X2^4"))) == 6
    motzkin = parse_poly("X1^4*X2^2 + X1^2*X2^4 - 3*X1^2*X2^2 + 1")
    assert newton_half_support(motzkin).points == ((0, 0), (1, 1), (2, 1), (1, 2))


def test_basis_order():
    assert sorted([(0, 2), (2, 0), (1, 1), (0, 0)], key=basis_key) == [(0, 0), (2, 0), (1, 1), (0, 2)]
    f = parse_poly("X1^4 + X2^2")
    assert candidate_box(f)[0] == (0, 0) and len(candidate_box(f)) == 9


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=6, unique=True))
def test_half_support_matches_exact_2d_hull(support):
    f = MPoly(2, {m: 1 for m in support})
    Q = newton_half_support(f)
    half = f.degree // 2
    expected = [
        (a, b) for a in range(half + 1) for b in range(half + 1) if in_hull_2d((2 * a, 2 * b), support)
    ]
    assert sorted(Q.points) == sorted(expected)
    assert recheck(Q, f)


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=6, unique=True))
def test_witnesses_recheck_in_three_variables(support):
    f = MPoly(3, {m: 1 for m in support})
    Q = newton_half_support(f)
    assert recheck(Q, f)
    for a, w in Q.witnesses.items():
        target = tuple(2 * x for x in a)
        exact = exact_hull_membership(target, f.support())
        assert isinstance(exact, Membership) == isinstance(w, Membership)


def test_witness_checks_reject_forgeries():
    pts = [(0, 0), (4, 0), (0, 4)]
    assert check_membership((2, 2), Membership((((4, 0), Fraction(1, 2)), ((0, 4), Fraction(1, 2)))), pts)
    assert not check_membership((2, 2), Membership((((4, 0), Fraction(1)),)), pts)
    assert check_separation((4, 4), Separation((Fraction(1), Fraction(1)), Fraction(4)), pts)
    assert not check_separation((2, 2), Separation((Fraction(1), Fraction(1)), Fraction(4)), pts)
    f = MPoly(2, {p: 1 for p in pts})
    Q = newton_half_support(f)
    Q.witnesses[(1, 1)] = Separation((Fraction(1), Fraction(1)), Fraction(3))
    assert not recheck(Q, f)
