import pytest

from diffduality.coefficients import parse_coefficient
from diffduality.gallery import metric_make


def q2(text):
    return parse_coefficient(text, 2)


@pytest.fixture
def mink4():
    return metric_make("minkowski", 4)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
