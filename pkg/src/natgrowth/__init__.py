"""Two-solution numerics for elliptic equations with natural growth in the gradient.

Solves ``-div(A grad u) = c0 u + mu <A grad u, grad u> + f`` with zero
Dirichlet data on a box, through the change of unknown
``v = (exp(mu u) - 1) / mu`` and a variational treatment of the resulting
semilinear problem.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    CertificateError,
    ConfigError,
    ConvergenceError,
    GeometryNotFound,
    HypothesisFailure,
    NatGrowthError,
)
from .grid import Grid, MatrixField  # noqa: E402
from .problem import ProblemData  # noqa: E402

__all__ = [
    "CertificateError",
    "ConfigError",
    "ConvergenceError",
    "GeometryNotFound",
    "Grid",
    "HypothesisFailure",
    "MatrixField",
    "NatGrowthError",
    "ProblemData",
]
