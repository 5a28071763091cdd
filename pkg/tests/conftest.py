import numpy as np
import pytest

from doubledark import figure_params

ACCEPTANCE_LINES = []


@pytest.fixture
def fig2a():
    return figure_params("fig2a")


@pytest.fixture
def fig2b():
    return figure_params("fig2b")


@pytest.fixture
def fig3a():
    return figure_params("fig3a")


@pytest.fixture
def fig3b():
    return figure_params("fig3b")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
