from __future__ import annotations

import json
import os
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import FIXTURES, rationals
from oracles import expand_certificate
from ratsos.certificate import (
    Certificate,
    bit_size,
    flat_list,
    from_json,
    parse_certificate,
    parse_flat_list,
    serialize,
    to_json,
    verify_exact,
)
from ratsos.errors import ParseError
from ratsos.poly import MPoly

NAMES = ("X1", "X2")


def mpolys(n=2):
    return st.dictionaries(st.tuples(*[st.integers(0, 3)] * n), rationals(), min_size=1, max_size=4).map(lambda t: MPoly(n, t))


steps_st = st.lists(st.tuples(rationals().map(lambda q: abs(q) + Fraction(1, 9)), mpolys()), max_size=4)


def total(steps, n=2):
    out = MPoly(n)
    for w, s in steps:
        out = out + s * s * MPoly.const(n, w)
    return out


@given(steps_st)
def test_checker_agrees_with_sympy_expansion(steps):
    target = total(steps)
    cert = Certificate(NAMES, target, tuple(steps), "multivsos")
    assert verify_exact(cert).verified
    assert expand_certificate(steps, 2) == dict(target.terms)


@given(steps_st, mpolys())
def test_checker_reports_the_exact_difference(steps, extra):
    target = total(steps) + extra
    res = verify_exact(Certificate(NAMES, target, tuple(steps), "multivsos"))
    assert res.verified == extra.is_zero()
    assert res.diff_poly(2) == extra


@given(steps_st)
def test_flat_list_round_trip(steps):
    cert = Certificate(NAMES, total(steps), tuple(steps), "multivsos")
    back = parse_certificate(serialize(cert))
    assert back.variables == NAMES and back.steps == cert.steps and back.target == cert.target
    assert back.provenance == "multivsos"


@given(steps_st)
def test_json_round_trip(steps):
    cert = Certificate(NAMES, total(steps), tuple(steps), "external")
    text = serialize(cert, "json")
    back = parse_certificate(text)
    assert back == cert
    assert from_json(json.loads(text)) == cert


def test_bit_size_counts_weights_and_coefficients():
    x = MPoly.var(1, 0)
    cert = Certificate(("X",), None, ((Fraction(3, 4), x + MPoly.const(1, 1)), (Fraction(1), -x)), "external")
    # 3/4: 2 + 3 bits; X + 1: 2 + 2; 1: 2; -X: 2
    assert bit_size(cert).tau == 13


def test_reference_univariate_list_bit_size():
    cert = parse_certificate(open(os.path.join(FIXTURES, "quartic_univsos1.cert")).read())
    # weights 1, 1, 3/4, 1 -> 11 bits; roots 0, X^2 + X/2 - 1/2, X + 1, -X -> 0 + 8 + 4 + 2 bits
    assert bit_size(cert).tau == 25


@pytest.mark.parametrize("name", ["quartic_univsos1.cert", "quartic_univsos2.cert", "bivariate_quartic.cert"])
def test_reference_certificates_verify(name):
    cert = parse_certificate(open(os.path.join(FIXTURES, name)).read())
    assert verify_exact(cert).verified
    assert expand_certificate(cert.steps, len(cert.variables)) == dict(cert.target.terms)


def test_flat_list_layout_and_target_override():
    x = MPoly.var(1, 0)
    cert = Certificate(("X",), x * x, ((Fraction(1), x),), "univsos1")
    assert flat_list(cert) == "[1, X]"
    assert serialize(cert) == "variables: X\ntarget: X^2\nprovenance: univsos1\n[1, X]\n"
    c2 = parse_flat_list("[2, X]", target="2*X^2")
    assert verify_exact(c2).verified


@pytest.mark.parametrize("text", [
    "[1, X, 2]",
    "[X, X]",
    "[-1, X]",
    "[1, (X]",
    "1, X",
    "colour: red\n[1, X]",
    "provenance: magic\n[1, X]",
    "",
])
def test_malformed_flat_lists(text):
    with pytest.raises(ParseError):
        parse_certificate(text)


@pytest.mark.parametrize("text", [
    "{",
    '{"steps": 3}',
    '{"steps": [{"weight": 1.5, "square": [[[1], "1"]]}]}',
    '{"steps": [{"weight": "-1", "square": [[[1], "1"]]}]}',
    '{"steps": [{"weight": "1", "square": [[[1, 2], "1"]]}], "variables": ["X"]}',
    '{"steps": [], "provenance": "nope"}',
    "[1, 2, 3]",
])
def test_malformed_json(text):
    with pytest.raises(ParseError):
        parse_certificate(text)


def test_verify_needs_a_target():
    with pytest.raises(ValueError):
        verify_exact(Certificate(("X",), None, ()))


def test_certificate_invariants():
    with pytest.raises(ValueError):
        Certificate(("X",), None, ((Fraction(0), MPoly.var(1, 0)),))
    with pytest.raises(ValueError):
        Certificate(("X",), None, ((Fraction(1), MPoly.var(2, 0)),))
    with pytest.raises(ValueError):
        Certificate((), None, ())
