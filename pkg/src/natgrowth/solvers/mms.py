"""Manufactured-solution refinement study for the ``u``-equation."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigError, ConvergenceError
from ..grid import Grid, MatrixField
from ..problem import ProblemData
from .general import HChoice, solve_general


@dataclass(frozen=True)
class SineProduct:
    """``u*(x) = amplitude * prod_k sin(pi x_k / L_k)``; vanishes on the box boundary."""

    amplitude: float = 1.0

    def value(self, grid):
        return self.amplitude * grid.sample(
            lambda *x: np.prod([np.sin(np.pi * xk / Lk) for xk, Lk in zip(x, grid.lengths)], axis=0)
        )

    def gradient(self, grid):
        X = grid.mesh()
        L = grid.lengths
        s = [np.sin(np.pi * x / l) for x, l in zip(X, L)]
        out = []
        for k in range(grid.ndim):
            term = self.amplitude * (np.pi / L[k]) * np.cos(np.pi * X[k] / L[k])
            for j in range(grid.ndim):
                if j != k:
                    term = term * s[j]
            out.append(term)
        return out

    def laplacian_weights(self, grid):
        """``-d_kk u* = (pi / L_k)^2 u*``."""
        return [(np.pi / l) ** 2 for l in grid.lengths]


def manufactured_source(u_star, grid, a, c0, mu):
    """``f = -div(A grad u*) - c0 u* - mu <A grad u*, grad u*>`` for constant diagonal ``A``."""
    u = u_star.value(grid)
    grads = u_star.gradient(grid)
    div = sum(ak * wk for ak, wk in zip(a, u_star.laplacian_weights(grid))) * u
    quad = sum(ak * gk * gk for ak, gk in zip(a, grads))
    return div - c0 * u - mu * quad


def mms_convergence(grid, u_star=SineProduct(), a=None, c0=0.0, mu=1.0, levels=3, scheme="flux"):
    """Solve on ``grid`` and ``levels - 1`` refinements; return ``[(h, error, order), ...]``.

    Parameters
    ----------
    grid : Grid
        Coarsest grid.
    a : sequence of float, optional
        Constant diagonal of ``A`` (identity by default).
    c0 : float or callable
        Constant, or ``c0(grid) -> nodal array`` so it can be resampled.
    mu : float

    ``error`` is the nodal max-norm error, ``order = log2(e_{2h} / e_h)``
    (``nan`` on the coarsest level).
    """
    if levels < 2:
        raise ConfigError("a refinement study needs at least two levels")
    a = tuple(float(x) for x in (a if a is not None else [1.0] * grid.ndim))
    if len(a) != grid.ndim or min(a) <= 0:
        raise ConfigError("A must be a positive constant diagonal of length N")
    out = []
    prev = None
    for _ in range(levels):
        c = c0(grid) if callable(c0) else c0 * np.ones(grid.shape)
        f = manufactured_source(u_star, grid, a, c, mu)
        A = MatrixField.diagonal(grid, a)
        data = ProblemData(grid, A, c, f, mu)
        unbounded = (np.full(grid.shape, -np.inf), np.full(grid.shape, np.inf))
        try:
            res = solve_general(data, HChoice(scheme=scheme), bracket=unbounded)
        except ConvergenceError as exc:
            raise ConvergenceError(f"MMS level h={grid.h}: {exc}", "mms") from exc
        err = float(np.max(np.abs(res.u - u_star.value(grid))))
        order = float(np.log2(prev / err)) if prev is not None and err > 0 else float("nan")
        out.append((max(grid.h), err, order))
        prev = err
        grid = grid.refine()
    return out


def bump(center, width, amplitude):
    """Gaussian ``c0`` factory for :func:`mms_convergence`."""

    def make(grid: Grid):
        return amplitude * grid.sample(
            lambda *x: np.exp(-sum((xk - ck) ** 2 for xk, ck in zip(x, center)) / (2 * width**2))
        )

    return make
