import numpy as np
import pytest

from csdiscord.states import XParams, x_to_matrix

ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bell():
    return x_to_matrix(XParams(0.5, 0, 0, 0.5))


@pytest.fixture
def mixed():
    return x_to_matrix(XParams(0.25, 0.25, 0.25))


@pytest.fixture
def ket00():
    return x_to_matrix(XParams(1.0))
