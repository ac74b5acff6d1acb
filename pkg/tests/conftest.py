import math

import numpy as np
import pytest

from gauss_nclass.gaussian import StandardMoments, thermal, tmsv, vacuum

R = 0.5
TMSV_LN = 1.0 / math.log(2.0)  # 2r log2(e) at r = 1/2
TMSV_DEPTH = 0.5 * (1.0 - math.exp(-1.0))

ACCEPTANCE_LINES = []


@pytest.fixture
def vac():
    return vacuum()


@pytest.fixture
def tmsv_state():
    return tmsv(R)


@pytest.fixture
def tmsv_moments():
    m = math.cosh(1.0) / 2
    c = math.sinh(1.0) / 2
    return StandardMoments(m, m, m, m, c, -c)


@pytest.fixture
def thermal_moments():
    return StandardMoments(1.0, 1.0, 1.0, 1.0, 0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
