"""Estimator-style wrappers (``fit`` / ``transform`` / ``predict``).

The "data" passed to ``fit`` is a :class:`~natgrowth.problem.ProblemData`
instance rather than a sample matrix; hyperparameters live in ``__init__``
so ``get_params`` / ``set_params`` and ``sklearn.base.clone`` work.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import nonlinearity as nl
from .energy import check_hypotheses
from .problem import ProblemData
from .solvers.general import HChoice, solve_general
from .solvers.pipeline import solve_model_both, solve_model_min


def _check_data(data):
    if not isinstance(data, ProblemData):
        raise TypeError(f"expected ProblemData, got {type(data).__name__}")
    return data


class ExponentialTransform(TransformerMixin, BaseEstimator):
    """``u -> v = (exp(mu u) - 1) / mu`` and back.

    Stateless; ``fit`` only validates ``mu``.
    """

    def __init__(self, mu=1.0):
        self.mu = mu

    def fit(self, X=None, y=None):
        self.mu_ = nl.check_mu(self.mu)
        return self

    def transform(self, X):
        check_is_fitted(self, "mu_")
        return nl.u_to_v(X, self.mu_)

    def inverse_transform(self, X):
        check_is_fitted(self, "mu_")
        return nl.v_to_u(X, self.mu_)


class HypothesisChecker(BaseEstimator):
    """Evaluate the solvability hypotheses of a problem; ``report_`` after ``fit``."""

    def __init__(self, sobolev_starts=5, seed=0):
        self.sobolev_starts = sobolev_starts
        self.seed = seed

    def fit(self, data, y=None):
        self.report_ = check_hypotheses(
            _check_data(data), sobolev_starts=self.sobolev_starts, seed=self.seed
        )
        return self

    def predict(self, data=None):
        """``True`` when the hypotheses hold."""
        check_is_fitted(self, "report_")
        return self.report_.passed


class LocalMinimizer(BaseEstimator):
    """Local energy minimizer in the ball ``||v|| <= rho`` (``rho=None``: default scale)."""

    def __init__(self, rho=None, tol=1e-9, require_hypotheses=True):
        self.rho = rho
        self.tol = tol
        self.require_hypotheses = require_hypotheses

    def fit(self, data, y=None):
        res = solve_model_min(
            _check_data(data), rho=self.rho, tol=self.tol, require_hypotheses=self.require_hypotheses
        )
        self.result_, self.v_, self.u_ = res, res.v, res.u
        return self

    def predict(self, data=None):
        """The solution ``u``."""
        check_is_fitted(self, "u_")
        return self.u_


class TwoSolutionSolver(BaseEstimator):
    """Local minimizer and mountain-pass solution of the model problem."""

    def __init__(self, rho=None, n_path=21, tol=1e-9, path_tol=1e-3, max_sweeps=3000,
                 require_hypotheses=True):
        self.rho = rho
        self.n_path = n_path
        self.tol = tol
        self.path_tol = path_tol
        self.max_sweeps = max_sweeps
        self.require_hypotheses = require_hypotheses

    def fit(self, data, y=None):
        r_min, r_mp = solve_model_both(
            _check_data(data),
            rho=self.rho,
            n_path=self.n_path,
            tol=self.tol,
            path_tol=self.path_tol,
            max_sweeps=self.max_sweeps,
            require_hypotheses=self.require_hypotheses,
        )
        self.minimizer_, self.saddle_ = r_min, r_mp
        self.separation_ = r_min.extra["separation"]
        return self

    def predict(self, data=None):
        """Stacked solutions ``u``, shape ``(2,) + grid.shape`` (minimizer first)."""
        check_is_fitted(self, "saddle_")
        return np.stack([self.minimizer_.u, self.saddle_.u])


class BracketedSolver(BaseEstimator):
    """Sub/supersolution-bracketed Newton solve of the general equation."""

    def __init__(self, kind="model", clip=None, scheme="flux", tol=1e-12, max_iter=100):
        self.kind = kind
        self.clip = clip
        self.scheme = scheme
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, data, y=None):
        choice = HChoice(self.kind, self.clip, self.scheme)
        res = solve_general(_check_data(data), choice, tol=self.tol, max_iter=self.max_iter)
        self.result_, self.u_ = res, res.u
        self.u_lower_, self.u_upper_ = res.extra["u_lower"], res.extra["u_upper"]
        return self

    def predict(self, data=None):
        check_is_fitted(self, "u_")
        return self.u_
