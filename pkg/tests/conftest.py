import numpy as np
import pytest

from discordant.qcore import mueller_row
from discordant.sampling import random_x_muellers


@pytest.fixture
def ex1():
    """Manufactured state whose x and z von Neumann values coincide."""
    return mueller_row(m03=0.23, m11=0.76, m22=0.6, m30=0.3, m33=0.8)


@pytest.fixture
def bell():
    return np.eye(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def random_states():
    return random_x_muellers(200, seed=2024)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
