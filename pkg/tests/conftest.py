import numpy as np
import pytest
from hypothesis import settings

from grazing_maps.systems import builtin

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def hamiltonian():
    return builtin("paper-hamiltonian")


@pytest.fixture(scope="session")
def monomial():
    return builtin("monomial4")


@pytest.fixture(scope="session")
def parabola():
    return builtin("parabola2")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
