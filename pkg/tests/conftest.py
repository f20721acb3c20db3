import numpy as np
import pytest

from lislimits import Medium, make_parallel_link
from lislimits.eigenmodes import assemble_kernel, solve_modes

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def unit_medium():
    return Medium(1.0)


@pytest.fixture(scope="session")
def desk_link(unit_medium):
    return make_parallel_link(2.0, (2.0, 2.0), (8.0, 8.0), medium=unit_medium)


@pytest.fixture(scope="session")
def desk_kernel(desk_link):
    return assemble_kernel(desk_link, 1 / 8, "x_to_vector")


@pytest.fixture(scope="session")
def desk_spectrum(desk_kernel):
    return solve_modes(desk_kernel)


@pytest.fixture
def rng():
    return np.random.default_rng(20201)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
