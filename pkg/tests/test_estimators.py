import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from natgrowth.estimators import (
    BracketedSolver,
    ExponentialTransform,
    HypothesisChecker,
    LocalMinimizer,
    TwoSolutionSolver,
)
from natgrowth.grid import Grid
from natgrowth.problem import ProblemData


@pytest.fixture(scope="module")
def small():
    grid = Grid.box((17, 17))
    c0 = grid.sample(lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.08))
    f = grid.sample(lambda x, y: 0.1 * np.sin(np.pi * x) * np.sin(np.pi * y))
    return ProblemData.model(grid, c0, f, 1.0)


def test_transform_round_trip():
    t = ExponentialTransform(mu=2.0).fit()
    u = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(t.inverse_transform(t.transform(u)), u, rtol=1e-14)
    assert t.get_params() == {"mu": 2.0}


@pytest.mark.parametrize(
    "est", [ExponentialTransform(), HypothesisChecker(), LocalMinimizer(), TwoSolutionSolver(), BracketedSolver()]
)
def test_clone_and_not_fitted(est):
    c = clone(est)
    assert c.get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        c.transform(0.0) if isinstance(c, ExponentialTransform) else c.predict()


def test_fit_predict(small):
    assert HypothesisChecker().fit(small).predict()
    lm = LocalMinimizer().fit(small)
    two = TwoSolutionSolver(n_path=15).fit(small)
    np.testing.assert_allclose(two.predict()[0], lm.predict(), atol=1e-10)
    assert two.predict().shape == (2, 17, 17) and two.separation_ >= 1e-4
    br = BracketedSolver().fit(small)
    np.testing.assert_allclose(br.predict(), lm.u_, atol=1e-8)
    assert np.all(br.u_lower_ <= br.u_) and np.all(br.u_ <= br.u_upper_)


def test_set_params():
    est = TwoSolutionSolver().set_params(n_path=31, tol=1e-10)
    assert est.n_path == 31 and est.tol == 1e-10


def test_rejects_non_problem():
    with pytest.raises(TypeError):
        LocalMinimizer().fit(np.zeros((3, 3)))
