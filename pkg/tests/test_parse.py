from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import rationals
from ratsos.errors import ParseError
from ratsos.parse import parse_poly, parse_poly_with_vars, parse_polys
from ratsos.poly import MPoly


def test_univariate_quartic():
    f, names = parse_poly_with_vars("1+X+X^2+X^3+X^4")
    assert names == ("X",)
    assert f == MPoly(1, {(k,): 1 for k in range(5)})


def test_bivariate_quartic():
    f, names = parse_poly_with_vars("4*X1^4 + 4*X1^3*X2 - 7*X1^2*X2^2 - 2*X1*X2^3 + 10*X2^4")
    assert names == ("X1", "X2")
    assert f == MPoly(2, {(4, 0): 4, (3, 1): 4, (2, 2): -7, (1, 3): -2, (0, 4): 10})


def test_operators_and_precedence():
    assert parse_poly("-X^2") == MPoly(1, {(2,): -1})
    assert parse_poly("(X+1)^2 - 2 X") == MPoly(1, {(2,): 1, (0,): 1})
    assert parse_poly("X**2 / 4 + 3/2") == MPoly(1, {(2,): Fraction(1, 4), (0,): Fraction(3, 2)})
    assert parse_poly("2(X)(X)") == MPoly(1, {(2,): 2})
    assert parse_poly("X^(2)") == MPoly(1, {(2,): 1})


def test_variable_order():
    f, names = parse_poly_with_vars("y*x + x")
    assert names == ("y", "x")
    g, names2 = parse_poly_with_vars("y*x + x", ["x", "y"])
    assert names2 == ("x", "y") and g == MPoly(2, {(1, 1): 1, (1, 0): 1})
    polys, names3 = parse_polys(["a", "b + a"])
    assert names3 == ("a", "b") and polys[0].nvars == 2


@pytest.mark.parametrize("text, column", [
    ("X^(1/2)", 5),
    ("X^-1", 3),
    ("X +", 4),
    ("(X", 3),
    ("X $ 2", 3),
    ("X / (X + 1)", 3),
    ("X / 0", 3),
])
def test_syntax_errors_carry_positions(text, column):
    with pytest.raises(ParseError) as e:
        parse_poly(text)
    assert e.value.line == 1
    assert e.value.column == column


def test_undeclared_variable_is_an_error():
    with pytest.raises(ParseError):
        parse_poly("X + Y", ["X"])


def test_multiline_position():
    with pytest.raises(ParseError) as e:
        parse_poly("X +\n  * 2")
    assert e.value.line == 2 and e.value.column == 3


@given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2)), rationals(), max_size=6))
def test_print_then_parse_is_identity(terms):
    p = MPoly(3, terms)
    names = ("a", "b", "c")
    assert parse_poly(p.format(names), names) == p
