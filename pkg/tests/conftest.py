import math

import pytest

from arraybeam.geometry import LinearParams, make_linear, table1_layouts


@pytest.fixture(scope="session")
def layouts():
    return table1_layouts()


@pytest.fixture
def line4():
    """Four mics, 0.2 m apart."""
    return make_linear(LinearParams(4, 0.2))


@pytest.fixture
def deg():
    return math.radians


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number, ok, detail, soft=False):
        tag = "PASS" if ok else ("FAIL (soft, reported)" if soft else "FAIL")
        line = f"{tag} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
