import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from acel.testing import seed_from_env  # noqa: E402

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return report


@pytest.fixture
def seed():
    return seed_from_env()


def pytest_report_header(config):
    return f"ACEL_SEED={seed_from_env()}"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
