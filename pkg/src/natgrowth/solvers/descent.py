"""Ball-constrained local minimization of the energy."""

import numpy as np

from ..energy import energy_gradient, energy_value, residual_norm, sobolev_gradient
from ..exceptions import ConvergenceError
from ..grid import h1_norm, inner
from .newton import newton_transformed
from .result import SolveResult

ARMIJO_C = 1e-4


def minimize_local(data, rho, tol=1e-9, max_iter=2000, polish_tol=1e-12):
    """Minimize the energy over the ball ``||v|| <= rho`` starting from zero.

    Projected gradient descent in the energy inner product (Sobolev
    gradient) with Armijo backtracking, followed by a Newton polish. The
    result must be interior to the ball; a minimizer on the sphere means
    ``rho`` is too small and raises :class:`ConvergenceError`.
    """
    grid = data.grid
    v = grid.zeros()
    E = energy_value(v, data)
    r = energy_gradient(v, data)
    rn = residual_norm(r, v, grid)
    history = [{"iteration": 0, "residual": rn, "energy": E}]
    alpha = 1.0
    on_sphere = False
    it = 0
    while rn > tol and it < max_iter:
        it += 1
        d = -sobolev_gradient(r, data)
        while True:
            trial = v + alpha * d
            norm = h1_norm(data.A, trial)
            projected = norm > rho
            if projected:
                trial *= rho / norm
            E_trial = energy_value(trial, data)
            if E_trial <= E + ARMIJO_C * inner(grid, r, trial - v):
                break
            alpha *= 0.5
            if alpha < 1e-14:
                break
        if alpha < 1e-14:
            break
        v, E, on_sphere = trial, E_trial, projected
        r = energy_gradient(v, data)
        rn = residual_norm(r, v, grid)
        history.append({"iteration": it, "residual": rn, "energy": E, "step": alpha})
        alpha = min(1.0, 2.0 * alpha)
    if on_sphere:
        raise ConvergenceError(
            f"projection active at termination (||v|| = rho = {rho:.6g}); increase rho",
            "minimize_local",
        )
    descent_iters = it
    if rn > polish_tol:
        pol = newton_transformed(data, v, tol=polish_tol)
        # a polished iterate that left the ball or climbed is a different critical point
        if h1_norm(data.A, pol.v) <= rho and pol.energy <= E + 1e-10 * max(1.0, abs(E)):
            if pol.residual_norm < rn:
                v, rn, E = pol.v, pol.residual_norm, pol.energy
                history += [dict(h, iteration=descent_iters + h["iteration"]) for h in pol.history[1:]]
                it += pol.iterations
    if rn > tol:
        raise ConvergenceError(
            f"local minimization stopped at residual {rn:.3e} > {tol:.1e}", "minimize_local"
        )
    return SolveResult(
        kind="LocalMin",
        v=v,
        iterations=it,
        residual_norm=rn,
        energy=E,
        min_v=float(v.min()),
        converged=True,
        history=history,
        extra={"rho": float(rho), "norm": h1_norm(data.A, v), "descent_iterations": descent_iters},
    )
