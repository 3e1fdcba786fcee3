import numpy as np
import pytest

from hetsis import activity_structured, calibrate_to_R0, homogeneous, isolated_blocks, proportionate_mixing


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def hom2():
    return homogeneous(2.0, 1.0)


@pytest.fixture
def two_group():
    return proportionate_mixing([2.0, 1.0], [0.5, 0.5], 1.0)


@pytest.fixture
def activity2():
    return calibrate_to_R0(activity_structured(), 2.0)


@pytest.fixture
def two_blocks():
    """Two isolated homogeneous blocks, each with R0 = 2 on its own."""
    return isolated_blocks([homogeneous(2.0, 1.0), homogeneous(2.0, 1.0)], [0.5, 0.5])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
