from __future__ import annotations

import os
from fractions import Fraction

import numpy as np
import pytest

from conftest import FIXTURES
from ratsos.errors import SdpaFormatError
from ratsos.multivsos import gram_problem
from ratsos.newton import newton_half_support
from ratsos.parse import parse_poly
from ratsos.sdp import SdpProblem, SymMatrix, solve_max_min_eig
from ratsos.sdp.sdpa import (
    format_solution,
    gram_from_blocks,
    sdpa_parse_problem,
    sdpa_parse_solution,
    sdpa_read_solution,
    sdpa_text,
    sdpa_write,
)
from ratsos.sdp.solver import solve_standard

BIVARIATE = "4*X1^4 + 4*X1^3*X2 - 7*X1^2*X2^2 - 2*X1*X2^3 + 10*X2^4"


def toy_problem() -> SdpProblem:
    return SdpProblem(1, [(SymMatrix(1, {(0, 0): 1}), 4)])


def gram_of(expr: str) -> SdpProblem:
    f = parse_poly(expr)
    return gram_problem(f, newton_half_support(f).points)[0]


GOLDENS = {
    "toy.dat-s": toy_problem,
    "x4_plus_1.dat-s": lambda: gram_of("X^4+1"),
    "bivariate_quartic.dat-s": lambda: gram_of(BIVARIATE),
}


@pytest.mark.parametrize("name", sorted(GOLDENS))
def test_golden_files_byte_for_byte(name, tmp_path):
    out = tmp_path / name
    sdpa_write(GOLDENS[name](), out)
    with open(os.path.join(FIXTURES, name), "rb") as fh:
        assert out.read_bytes() == fh.read()


def test_toy_file_layout():
    # <[1], G> = 4: least-norm G0 = 4, shift T = 5, so b = 4 + 5 * 1
    assert sdpa_text(toy_problem()) == (
        "* max lambda_min(G) over 1 affine constraints; G = Y + (s - 5) I\n"
        "1\n2\n1 -1\n9\n0 2 1 1 1\n1 1 1 1 1\n1 2 1 1 1\n"
    )


def test_non_integer_data_is_written_as_float_repr():
    prob = SdpProblem(1, [(SymMatrix(1, {(0, 0): Fraction(1, 4)}), Fraction(1, 2))])
    text = sdpa_text(prob)
    assert "0.25" in text and "(s - 3)" in text


def test_no_constraints_is_rejected():
    with pytest.raises(ValueError):
        sdpa_text(SdpProblem(2, []))


@pytest.mark.parametrize("name", sorted(GOLDENS))
def test_problem_parses_back_to_the_lift(name):
    prob = GOLDENS[name]()
    data = sdpa_parse_problem(sdpa_text(prob))
    assert data.block_struct == [prob.dim, -1]
    C, A, b = data.to_standard()
    res = solve_standard(C, A, b)
    X = np.asarray(res.X, dtype=float)
    g = gram_from_blocks(prob, data.split_blocks(X))
    assert np.allclose(g, solve_max_min_eig(prob).gram, atol=1e-7)


def test_problem_parser_accepts_punctuation_and_comments():
    text = '"comment"\n* another\n1 = mDIM\n2 = nBLOCK\n{1, -1}\n{9}\n0 2 1 1 1\n1 1 1 1 1\n1 2 1 1 1\n'
    data = sdpa_parse_problem(text)
    assert data.block_struct == [1, -1] and data.c == [9.0]


@pytest.mark.parametrize("text, line", [
    ("1\n2\n1 -1\n", 3),
    ("1\n2\n1 -1\n9\n0 2 1 1\n", 5),
    ("1\n2\n1 -1\n9\n3 1 1 1 1\n", 5),
    ("1\n2\n1 -1\n9\n1 1 2 2 1\n", 5),
    ("x\n", 1),
])
def test_problem_parser_reports_line_numbers(text, line):
    with pytest.raises(SdpaFormatError) as e:
        sdpa_parse_problem(text)
    assert e.value.line == line


def test_solution_round_trip_through_sdpa_layout(tmp_path):
    prob = gram_of(BIVARIATE)
    data = sdpa_parse_problem(sdpa_text(prob))
    C, A, b = data.to_standard()
    res = solve_standard(C, A, b)
    out = tmp_path / "sol.out"
    out.write_text(format_solution(data, np.asarray(res.X, float), res.y, np.asarray(res.Z, float)))
    sol = sdpa_parse_solution(out.read_text())
    assert sol.phase == "pdOPT"
    assert sol.primal_obj == pytest.approx(sol.dual_obj, abs=1e-6)
    g = sdpa_read_solution(out, prob, 40)
    ref = SymMatrix.from_float(solve_max_min_eig(prob).gram, 40)
    assert np.allclose(g.to_numpy(), ref.to_numpy(), atol=1e-9)


def test_solution_parser_reads_sdpa_output_style():
    text = """SDPA start
phase.value  = pdOPT
   objValPrimal = -6.6666666666666663e-01
   objValDual   = -6.6666666666666663e-01
xVec =
{+1.0e+00,-2.0e+00}
xMat =
{
{+1.0e+00 }
{ +2.0e+00 }
}
yMat =
{
{
{+2.5e+00,+5.0e-01 },
{+5.0e-01,+2.5e+00 }   }
{+3.0e+00 }
}
"""
    sol = sdpa_parse_solution(text)
    assert sol.x_vec == [1.0, -2.0]
    assert sol.y_mat[0].shape == (2, 2) and list(sol.y_mat[1]) == [3.0]
    prob = SdpProblem(2, [(SymMatrix.identity(2), 4)])
    shift = 3  # lift of trace = 4 on 2x2: least-norm G0 = 2 I
    g = gram_from_blocks(prob, sol.y_mat)
    assert g[0, 0] == pytest.approx(2.5 + 3.0 - shift)


@pytest.mark.parametrize("text", ["phase.value = pdOPT\n", "xVec = {1,\n", "xVec = {1}\nxMat = {}\nyMat = {{1}}\n"])
def test_corrupted_solution_is_rejected(text, tmp_path):
    prob = toy_problem()
    path = tmp_path / "bad.out"
    path.write_text(text)
    with pytest.raises(SdpaFormatError):
        sdpa_read_solution(path, prob)
