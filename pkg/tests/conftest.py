import numpy as np
import pytest

from natgrowth.config import default_config, validate
from natgrowth.grid import Grid
from natgrowth.problem import ProblemData
from natgrowth.solvers.pipeline import solve_model_both


@pytest.fixture(scope="session")
def fixture_config():
    return default_config()


@pytest.fixture(scope="session")
def fixture_problem(fixture_config):
    return fixture_config.make_problem()


@pytest.fixture(scope="session")
def fixture_solutions(fixture_problem):
    """``(minimizer, saddle)`` on the shipped fixture, computed once per session."""
    return solve_model_both(fixture_problem)


@pytest.fixture(scope="session")
def mirror_problem(fixture_config):
    raw = fixture_config.to_dict()
    raw["mu"] = -1.0
    raw["f"] = {"type": "sine-product", "amplitude": -0.1}
    return validate(raw).make_problem()


@pytest.fixture
def grid1d():
    return Grid((3,), (0.25,))


@pytest.fixture
def hand1d(grid1d):
    """1D, h = 1/4, A = I, mu = 1, c0 = 0, f = 1."""
    return ProblemData.model(grid1d, 0.0, 1.0, 1.0)


@pytest.fixture
def spike():
    return np.array([0.0, 1.0, 0.0])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import summary_lines

    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
