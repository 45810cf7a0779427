"""Damped Newton iteration on the transformed (semilinear) equation."""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import nonlinearity as nl
from ..energy import energy_gradient, energy_value, residual_norm
from ..validation import check_field
from .result import SolveResult

ARMIJO_C = 1e-4


def factorize(J):
    """Sparse LU of ``J``; on exact singularity retry with a ``1e-12`` diagonal shift.

    Returns ``(solve, regularized)``.
    """
    J = sp.csc_matrix(J)
    try:
        return spla.splu(J).solve, False
    except RuntimeError:
        return spla.splu(J + 1e-12 * sp.identity(J.shape[0], format="csc")).solve, True


def transformed_jacobian(v, data):
    """``L - diag(c0 + mu f + c0 g'(v))``."""
    diag = data.c0 + data.mu * data.f
    if np.any(data.c0):
        diag = diag + data.c0 * nl.g_prime(v, data.mu)
    return data.A.stiffness - sp.diags(diag.ravel())


def newton_transformed(data, v_init, tol=1e-12, max_iter=50, kind="Newton"):
    """Newton's method with Armijo backtracking on ``||r||^2 / 2``.

    Stops when the scaled residual is ``<= tol``, or when the line search
    can no longer reduce the residual (round-off floor); ``converged`` tells
    which. Never raises on non-convergence; callers decide.
    """
    grid = data.grid
    v = check_field(grid, v_init, "v_init").copy()
    r = energy_gradient(v, data)
    rn = residual_norm(r, v, grid)
    history = [{"iteration": 0, "residual": rn, "energy": energy_value(v, data)}]
    message = "converged"
    regularized = False
    it = 0
    while rn > tol:
        if it >= max_iter:
            message = "max-iterations"
            break
        it += 1
        solve, reg = factorize(transformed_jacobian(v, data))
        regularized |= reg
        dv = -solve(r.ravel()).reshape(grid.shape)
        phi0 = 0.5 * float(np.sum(r * r))
        alpha = 1.0
        while True:
            trial = v + alpha * dv
            r_trial = energy_gradient(trial, data)
            phi = 0.5 * float(np.sum(r_trial * r_trial))
            if np.isfinite(phi) and phi <= (1.0 - 2.0 * ARMIJO_C * alpha) * phi0:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                break
        if alpha < 1e-10:
            message = "line-search-failure"
            it -= 1
            break
        v, r = trial, r_trial
        rn = residual_norm(r, v, grid)
        history.append(
            {"iteration": it, "residual": rn, "energy": energy_value(v, data), "step": alpha}
        )
    return SolveResult(
        kind=kind,
        v=v,
        iterations=it,
        residual_norm=rn,
        energy=energy_value(v, data),
        min_v=float(v.min()),
        converged=bool(rn <= tol),
        message=message if rn > tol else "converged",
        history=history,
        extra={"jacobian_regularized": regularized},
    )
