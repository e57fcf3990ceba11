from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
import pytest
import sympy
from hypothesis import given

from conftest import rationals
from oracles import SX, from_sympy_u, symbols, to_sympy_m, to_sympy_u
from ratsos.poly import MPoly, UPoly, poly_gcd, split_square, squarefree_decompose, squarefree_part

X = UPoly.x()

upolys = st.lists(rationals(), min_size=0, max_size=7).map(UPoly)
nonzero_upolys = upolys.filter(lambda p: not p.is_zero())


def mpolys(n: int = 2, max_deg: int = 3):
    mono = st.tuples(*[st.integers(0, max_deg)] * n)
    return st.dictionaries(mono, rationals(), max_size=6).map(lambda t: MPoly(n, t))


@given(upolys, upolys)
def test_ring_operations_match_sympy(a, b):
    assert to_sympy_u(a + b) == to_sympy_u(a) + to_sympy_u(b)
    assert to_sympy_u(a - b) == to_sympy_u(a) - to_sympy_u(b)
    assert to_sympy_u(a * b) == to_sympy_u(a) * to_sympy_u(b)


@given(upolys, nonzero_upolys)
def test_divmod_matches_sympy(a, b):
    q, r = a.divmod(b)
    sq, sr = sympy.div(to_sympy_u(a), to_sympy_u(b))
    assert to_sympy_u(q) == sq and to_sympy_u(r) == sr
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(nonzero_upolys, nonzero_upolys)
def test_gcd_is_monic_sympy_gcd(a, b):
    g = poly_gcd(a, b)
    assert g == from_sympy_u(sympy.gcd(to_sympy_u(a), to_sympy_u(b)).monic())


@given(upolys, rationals())
def test_derivative_shift_and_evaluation(p, a):
    assert to_sympy_u(p.derivative()) == to_sympy_u(p).diff(SX)
    assert p.shift(a)(Fraction(0)) == p(a)
    assert p(a) == to_sympy_u(p).eval(sympy.Rational(a.numerator, a.denominator))


def _sqf_checks(p: UPoly):
    sqf = squarefree_decompose(p)
    assert sqf.expand() == p
    mult = [m for _, m in sqf.factors]
    assert mult == sorted(set(mult))
    for f, _ in sqf.factors:
        assert f.lc == 1 and f.degree > 0
        assert poly_gcd(f, f.derivative()).degree == 0
    for (f, _), (g, _) in zip(sqf.factors, sqf.factors[1:]):
        assert poly_gcd(f, g).degree == 0


@given(st.lists(st.tuples(st.lists(rationals(), min_size=2, max_size=3).map(UPoly), st.integers(1, 4)), min_size=1, max_size=3), rationals().filter(bool))
def test_yun_round_trip_on_products(parts, c):
    p = UPoly.const(c)
    for f, m in parts:
        if f.degree > 0:
            p = p * f ** m
    _sqf_checks(p)


def test_yun_known_factorization():
    p = (X - 1) ** 3 * (X + 2) ** 2 * (X * X + 1)
    sqf = squarefree_decompose(p * 3)
    assert sqf.content == 3
    assert sqf.factors == ((X * X + 1, 1), (X + 2, 2), (X - 1, 3))
    assert squarefree_part(p) == (X - 1) * (X + 2) * (X * X + 1)
    g, h = split_square(p)
    assert g * h * h == p and h == (X - 1) * (X + 2)


def test_zero_polynomial_has_no_decomposition():
    with pytest.raises(ValueError):
        squarefree_decompose(UPoly())


@given(mpolys(), mpolys())
def test_multivariate_product_matches_sympy(a, b):
    syms = symbols(2)
    assert sympy.expand(to_sympy_m(a * b, syms) - to_sympy_m(a, syms) * to_sympy_m(b, syms)) == 0
    assert sympy.expand(to_sympy_m(a - b, syms) - to_sympy_m(a, syms) + to_sympy_m(b, syms)) == 0


@given(mpolys(3, 2), st.tuples(rationals(), rationals(), rationals()))
def test_multivariate_evaluation_and_derivative(p, pt):
    syms = symbols(3)
    e = to_sympy_m(p, syms)
    subs = {s: sympy.Rational(v.numerator, v.denominator) for s, v in zip(syms, pt)}
    assert p(*pt) == e.subs(subs)
    assert sympy.expand(to_sympy_m(p.derivative(1), syms) - e.diff(syms[1])) == 0


def test_univariate_conversion_round_trip():
    p = X ** 4 + X * Fraction(1, 3) - 2
    assert p.to_mpoly().to_upoly() == p
    assert p.to_mpoly().degree == 4


def test_formatting():
    assert (X ** 2 - X * Fraction(1, 2) + 1).format() == "X^2 - 1/2*X + 1"
    p = MPoly(2, {(2, 0): 4, (1, 1): -7, (0, 0): Fraction(1, 2)})
    assert p.format(("X1", "X2")) == "4*X1^2 - 7*X1*X2 + 1/2"
