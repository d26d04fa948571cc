import json
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def diagonal_heights(tmp_path):
    path = tmp_path / "diag.json"
    path.write_text(json.dumps({"heights": [0, 1]}))
    return path


@pytest.fixture
def wiggle_heights(tmp_path):
    path = tmp_path / "wiggle.json"
    path.write_text(json.dumps([0.25, 0.75, 0.5, 0.125, 0.625]))
    return path


def frac(text):
    return Fraction(text)
