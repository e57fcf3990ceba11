from __future__ import annotations

import json
import os
import re
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import FAKE_SDPA, FIXTURES
from ratsos.certificate import parse_certificate, verify_exact
from ratsos.cli import main
from ratsos.parse import parse_poly

QUARTIC = "1+X+X^2+X^3+X^4"
BIVARIATE = "4*X1^4 + 4*X1^3*X2 - 7*X1^2*X2^2 - 2*X1*X2^3 + 10*X2^4"
MOTZKIN = "X1^4*X2^2 + X1^2*X2^4 - 3*X1^2*X2^2 + 1"


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("mode", ["auto", "univsos1", "univsos2"])
def test_certify_quartic(capsys, mode):
    code, out, _ = run(capsys, "certify", "--mode", mode, QUARTIC)
    assert code == 0
    cert = parse_certificate(out)
    assert verify_exact(cert).verified
    assert cert.provenance == ("univsos2" if mode == "auto" else mode)


def test_certify_json_and_declared_variables(capsys):
    code, out, _ = run(capsys, "certify", "--format", "json", "--vars", "X2,X1", BIVARIATE)
    assert code == 0
    data = json.loads(out)
    assert data["variables"] == ["X2", "X1"] and data["provenance"] == "multivsos"
    assert verify_exact(parse_certificate(out)).verified


def test_certify_reads_a_file(capsys, tmp_path):
    path = tmp_path / "f.txt"
    path.write_text(BIVARIATE + "\n")
    code, out, _ = run(capsys, "certify", str(path))
    assert code == 0 and verify_exact(parse_certificate(out)).verified


def test_certify_negative_prints_witness(capsys):
    code, out, _ = run(capsys, "certify", "X^2-1")
    assert code == 2
    assert "witness: X = 0" in out and "value: -1" in out


def test_certify_motzkin_is_exit_3(capsys):
    code, out, err = run(capsys, "certify", MOTZKIN)
    assert code == 3 and out == "" and "no certificate" in err


@pytest.mark.parametrize("args", [
    ["certify", "X^(1/2)"],
    ["certify", "--mode", "univsos1", "X1^2 + X2^2"],
    ["certify", "--precision", "0", "X^2+1"],
    ["certify", "--epsilon", "abc", "X^2+1"],
    ["certify", "--solver", "sdpa:/nonexistent/sdpa", "X1^2 + X2^2"],
    ["frobnicate"],
    [],
])
def test_usage_errors_are_exit_1(capsys, args):
    code = None
    try:
        code = main(args)
    except SystemExit as e:
        code = e.code
    assert code == 1


def test_external_solver_through_cli(capsys):
    code, out, _ = run(capsys, "certify", "--solver", f"sdpa:{FAKE_SDPA}", BIVARIATE)
    assert code == 0 and verify_exact(parse_certificate(out)).verified
    code, out, err = run(capsys, "certify", "--solver", "sdpa:/nonexistent/sdpa", "--fallback", BIVARIATE)
    assert code == 0


def test_precision_and_epsilon_flags(capsys):
    code, out, _ = run(capsys, "certify", "--mode", "univsos2", "--epsilon", "1/8", "--precision", "106", QUARTIC)
    assert code == 0 and verify_exact(parse_certificate(out)).verified


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "univsos1", "output_format": "json"}))
    code, out, _ = run(capsys, "certify", "--config", str(cfg), QUARTIC)
    assert code == 0 and json.loads(out)["provenance"] == "univsos1"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "certify", "--config", str(cfg), QUARTIC)[0] == 1


@pytest.mark.parametrize("name", ["quartic_univsos1.cert", "quartic_univsos2.cert", "bivariate_quartic.cert"])
def test_verify_reference_certificates(capsys, name):
    code, out, _ = run(capsys, "verify", os.path.join(FIXTURES, name))
    assert code == 0 and out.strip() == "verified"


def test_verify_tampered_file_prints_difference(capsys, tmp_path):
    text = open(os.path.join(FIXTURES, "bivariate_quartic.cert")).read().replace("395/1764", "397/1764")
    path = tmp_path / "t.cert"
    path.write_text(text)
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 2
    assert "target - certificate = -1/882*X2^4" in out


def test_verify_target_flag_and_missing_target(capsys, tmp_path):
    path = tmp_path / "c.cert"
    path.write_text("[1, X + 1]\n")
    assert run(capsys, "verify", str(path))[0] == 1
    assert run(capsys, "verify", "--target", "X^2 + 2*X + 1", str(path))[0] == 0
    assert run(capsys, "verify", "--target", "X^2 + 1", str(path))[0] == 2


def test_verify_malformed_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"steps": [')
    code, _, err = run(capsys, "verify", str(path))
    assert code == 1 and "malformed JSON" in err
    assert run(capsys, "verify", str(tmp_path / "missing.cert"))[0] == 1


def test_certify_output_round_trips_through_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", BIVARIATE)
    path = tmp_path / "out.cert"
    path.write_text(out)
    assert run(capsys, "verify", str(path))[0] == 0


def test_bench_command(capsys, tmp_path):
    tsv, js = tmp_path / "r.tsv", tmp_path / "r.json"
    code, out, _ = run(capsys, "bench", "--suite", "paper-examples", "--out", str(tsv), "--json", str(js))
    assert code == 0 and out == ""
    lines = tsv.read_text().splitlines()
    assert len(lines) == 4 and all(l.split("\t")[4] == "true" for l in lines[1:])
    assert len(json.loads(js.read_text())) == 3
    code, out, _ = run(capsys, "bench", "--suite", "random-sos(2,4,0)")
    assert code == 0 and out.count("\n") == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ratsos", "certify", "X^2-1"], capture_output=True, text=True)
    assert proc.returncode == 2
    m = re.search(r"witness: X = (\S+)", proc.stdout)
    assert m and parse_poly("X^2-1").to_upoly()(Fraction(m.group(1))) < 0
