import math

import pytest

from hstbeam import ArrayConfig, DeploymentGeometry

ACCEPTANCE_LINES = []


@pytest.fixture
def ref_cfg():
    # h = 50 m, f_c = 2.4 GHz, d = lambda / 2, broadside
    return ArrayConfig.from_carrier(2.4e9, 0.5)


@pytest.fixture
def geom():
    return DeploymentGeometry(50.0)


@pytest.fixture
def acceptance_report():
    def report(criterion, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


QUARTER = math.pi / 4
