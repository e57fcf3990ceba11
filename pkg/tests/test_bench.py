from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from ratsos.bench import parse_suite, random_sos, run_bench, to_json, to_tsv
from ratsos.errors import ConfigError
from ratsos.newton import newton_half_support

RANDOM_2_4_5_TAU = [3215, 14, 3084, 3513, 866]


def test_worked_examples_suite():
    rows = run_bench(parse_suite("paper-examples"))
    assert [r.name for r in rows] == ["quartic-univsos1", "quartic-univsos2", "bivariate-quartic"]
    assert [r.mode for r in rows] == ["univsos1", "univsos2", "multivsos"]
    assert all(r.success for r in rows)


def test_random_suite_is_reproducible_and_locked():
    rows = run_bench(parse_suite("random-sos(2,4,5)", seed=0))
    assert all(r.success for r in rows)
    assert [r.tau for r in rows] == RANDOM_2_4_5_TAU
    assert [r.tau for r in run_bench(parse_suite("random-sos(2,4,5)", seed=0))] == RANDOM_2_4_5_TAU


def test_random_sos_has_requested_shape_and_is_nonnegative():
    for seed in range(20):
        rng = random.Random(seed)
        f = random_sos(3, 6, rng)
        assert f.nvars == 3 and f.degree == 6
        assert len(newton_half_support(f)) >= 1
        for _ in range(10):
            point = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
            assert f(*point) >= 0


def test_empty_suite_and_report_formats():
    assert run_bench(parse_suite("random-sos(2,4,0)")) == []
    assert to_tsv([]) == "name\tnvars\tdegree\tmode\tsuccess\ttau\tseconds\tstatus\n"
    rows = run_bench(parse_suite("random-sos(1,4,2)"))
    data = json.loads(to_json(rows))
    assert [d["success"] for d in data] == [True, True]
    assert to_tsv(rows).count("\n") == 3


@pytest.mark.parametrize("suite", ["random-sos(2,3,1)", "random-sos(0,4,1)", "everything"])
def test_bad_suites(suite):
    with pytest.raises(ConfigError):
        parse_suite(suite)
