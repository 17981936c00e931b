import math

import numpy as np
import pytest

from qgame import STANDARD_PD, EWLConfig

# Prisoner's Dilemma with strategies ordered C, D
PD_ROW = [[3, 0], [5, 1]]
PD_COL = [[3, 5], [0, 1]]


@pytest.fixture
def pd_bimatrix():
    return STANDARD_PD.bimatrix()


@pytest.fixture
def pd_symmetric():
    return STANDARD_PD.symmetric_game()


@pytest.fixture
def max_ent():
    return EWLConfig(STANDARD_PD, math.pi / 2)


@pytest.fixture
def no_ent():
    return EWLConfig(STANDARD_PD, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
