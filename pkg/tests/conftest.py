import numpy as np
import pytest

from fermisea import BareCharge, dress, make_model

TWO_SEA = [(-1.0, -0.2), (0.3, 0.9)]
SYM_TWO = [(-1.1, -0.4), (0.4, 1.1)]


@pytest.fixture(scope="session")
def ll2():
    return make_model("lieb_liniger", 2.0)


@pytest.fixture(scope="session")
def quad():
    return BareCharge.monomial(2)


@pytest.fixture(scope="session")
def two_sea(ll2, quad):
    return dress(ll2, quad, TWO_SEA, 64)


@pytest.fixture(scope="session")
def sym_two(ll2, quad):
    return dress(ll2, quad, SYM_TWO, 64)


@pytest.fixture(scope="session")
def tonks(quad):
    return dress(make_model("lieb_liniger", 1e9), quad, [(-1.0, 1.0)], 64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
