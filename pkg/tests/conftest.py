import numpy as np
import pytest

from leptovar.embedded import EIGHT_DAY, eight_day


@pytest.fixture
def t1():
    return eight_day()


@pytest.fixture
def y1():
    return np.array(EIGHT_DAY["y"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
