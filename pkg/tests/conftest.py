from __future__ import annotations

import os
import sys
from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
FAKE_SDPA = os.path.join(os.path.dirname(__file__), "fake_sdpa.py")


def rationals(max_num: int = 20, max_den: int = 8):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
