import numpy as np

from ..energy import coercivity_lambda
from ..exceptions import HypothesisFailure
from ..grid import lp_norm
from ..linalg import conjugate_gradient
from ..validation import check_field
from .result import SolveResult


def solve_linear(weight, rhs, data, rtol=1e-12, check=True):
    """Solve ``-div(A grad v) - weight v = rhs`` by conjugate gradients.

    Refuses (``HypothesisFailure``) unless the coercivity constant of
    ``weight`` is positive, since otherwise the operator is not positive
    definite.
    """
    grid = data.grid
    w = check_field(grid, weight, "weight", allow_scalar=True)
    b = check_field(grid, rhs, "rhs", allow_scalar=True)
    if check:
        lam = coercivity_lambda(w, data)
        if lam <= 0:
            raise HypothesisFailure(
                f"operator is not coercive (lambda = {lam:.6g})", "solve_linear"
            )
    L = data.A.stiffness
    wf = w.ravel()
    x, its, rel = conjugate_gradient(lambda x: L @ x - wf * x, b.ravel(), rtol=rtol)
    v = x.reshape(grid.shape)
    return SolveResult(
        kind="Linear",
        v=v,
        iterations=its,
        residual_norm=rel * lp_norm(grid, b, 2) / (1.0 + lp_norm(grid, v, 2)),
        min_v=float(v.min()),
        converged=True,
        extra={"relative_residual": rel},
    )


def linear_operator(weight, data):
    """Sparse matrix of ``L - diag(weight)`` (handy for dense oracles)."""
    import scipy.sparse as sp

    w = check_field(data.grid, weight, "weight", allow_scalar=True)
    return data.A.stiffness - sp.diags(np.ravel(w))
