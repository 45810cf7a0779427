"""Bracketed Newton solver for the quadratic-growth equation in ``u``.

The discrete equation is ``L u = H(x, u, grad_h u)`` with
``H = c0 u + mu(x) Q(u) + f`` (``"model"``) or with ``Q`` capped at a level
``K`` (``"clipped"``). Two discretizations of ``Q ~ <A grad u, grad u>``:

``"flux"`` (diagonal ``A`` only)
    ``Q_i = sum_k sum_{nb} a_face (exp(mu d) - 1 - mu d) / (mu h_k^2)``,
    ``d = u_nb - u_i``. With ``v = (exp(mu u) - 1) / mu`` this makes
    ``L u - Q = c0 u + f`` equivalent node by node to the transformed
    equation solved by the variational solvers, and ``Q >= 0`` grows with
    ``mu``, which the bracket needs.
``"centered"``
    ``<A grad_h u, grad_h u>`` from centered differences; any ``A``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .. import nonlinearity as nl
from ..exceptions import CertificateError, ConfigError, ConvergenceError
from ..grid import centered_difference, gradient_sq
from ..energy import residual_norm
from ..validation import check_field
from .newton import factorize
from .result import SolveResult

ARMIJO_C = 1e-4
#: slack for the super/subsolution inequalities
BRACKET_TOL = 1e-8
#: slack for the final nodewise containment check
CONTAIN_TOL = 1e-10


@dataclass(frozen=True)
class HChoice:
    """Member of the built-in family of right-hand sides.

    Parameters
    ----------
    kind : {"model", "clipped"}
    clip : float, optional
        Cap ``K`` on the gradient term for ``"clipped"``.
    scheme : {"flux", "centered"}
    """

    kind: str = "model"
    clip: float = None
    scheme: str = "flux"

    def __post_init__(self):
        if self.kind not in ("model", "clipped"):
            raise ConfigError(f"unknown H kind {self.kind!r}")
        if self.scheme not in ("flux", "centered"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.kind == "clipped" and not (self.clip is not None and self.clip > 0):
            raise ConfigError("clipped H needs a positive clip level")


def _shifted(u, axis, step):
    """``u`` shifted by one node along ``axis`` with zero ghost values."""
    pad = [(0, 0)] * u.ndim
    pad[axis] = (1, 1)
    ext = np.pad(u, pad)
    sl = [slice(None)] * u.ndim
    sl[axis] = slice(1 + step, ext.shape[axis] - 1 + step)
    return ext[tuple(sl)]


def _face_pair(A, axis):
    """Face coefficients seen from each node: (towards ``-``, towards ``+``)."""
    a = A.face_coefficients(axis)
    lo = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return a[tuple(lo)], a[tuple(hi)]


def _excess(x):
    """``(exp(x) - 1 - x)`` and its derivative ``exp(x) - 1``, accurate for small ``x``."""
    with np.errstate(over="raise"):
        em1 = np.expm1(x)
    return em1 - x, em1


def flux_gradient_term(A, u, mu):
    """Flux-form ``Q(u)`` and the sparse Jacobian ``dQ/du``."""
    if not A.is_diagonal:
        raise ConfigError("the flux scheme needs a diagonal coefficient matrix")
    g = A.grid
    u = check_field(g, u, "u")
    mu = np.broadcast_to(np.asarray(mu, dtype=float), g.shape)
    Q = np.zeros(g.shape)
    diag = np.zeros(g.shape)
    offdiag = {}
    strides = [int(np.prod(g.n[k + 1 :])) for k in range(g.ndim)]
    for k in range(g.ndim):
        a_minus, a_plus = _face_pair(A, k)
        h2 = g.h[k] ** 2
        for step, a in ((-1, a_minus), (1, a_plus)):
            d = _shifted(u, k, step) - u
            ex, em1 = _excess(mu * d)
            Q += a * ex / (mu * h2)
            w = a * em1 / h2
            diag -= w
            inside = np.ones(g.shape, dtype=bool)
            edge = [slice(None)] * g.ndim
            edge[k] = -1 if step == 1 else 0
            inside[tuple(edge)] = False
            offdiag[step * strides[k]] = np.where(inside, w, 0.0).ravel()
    n = g.size
    mats = [sp.diags(diag.ravel())]
    for off, w in offdiag.items():
        mats.append(sp.diags(w[:n - off] if off > 0 else w[-off:], off, shape=(n, n)))
    return Q, sp.csr_matrix(sum(mats[1:], mats[0]))


def centered_gradient_term(A, u):
    """``<A grad_h u, grad_h u>`` (centered) and its sparse Jacobian."""
    g = A.grid
    u = check_field(g, u, "u")
    C = [centered_difference(g, k) for k in range(g.ndim)]
    grads = [Ck @ u.ravel() for Ck in C]
    J = sp.csr_matrix((g.size, g.size))
    for i in range(g.ndim):
        for j in range(g.ndim):
            aij = A.values[..., i, j].ravel()
            if np.any(aij):
                J = J + sp.diags(2.0 * aij * grads[j]) @ C[i]
    return gradient_sq(A, u), sp.csr_matrix(J)


def u_residual(data, u, choice=HChoice(), jacobian=False):
    """Nodal ``L u - H(x, u, grad_h u)``; with ``jacobian`` also its sparse derivative."""
    g = data.grid
    u = check_field(g, u, "u")
    mu = data.mu
    if choice.scheme == "flux":
        Q, dQ = flux_gradient_term(data.A, u, mu)
        weight = 1.0
    else:
        Q, dQ = centered_gradient_term(data.A, u)
        weight = np.broadcast_to(np.asarray(mu, dtype=float), g.shape)
        Q = weight * Q
    if choice.kind == "clipped":
        active = Q < choice.clip
        Q = np.where(active, Q, choice.clip)
        weight = np.where(active, weight, 0.0)
    r = (data.A.stiffness @ u.ravel()).reshape(g.shape) - Q - data.c0 * u - data.f
    if not jacobian:
        return r
    J = data.A.stiffness - sp.diags(np.ravel(np.broadcast_to(weight, g.shape))) @ dQ
    return r, sp.csr_matrix(J - sp.diags(data.c0.ravel()))


def bracket_problem(data):
    """Extremal model instance: ``|c0|``, ``|f|`` and the constant slope ``mu_bar Lambda / lambda``.

    ``mu_bar`` bounds ``|mu(x)|``; ``Lambda / lambda`` converts the growth
    bound from ``|grad u|^2`` to ``<A grad u, grad u>``.
    """
    mu_bar = data.mu_bounds[1] if data.variable_mu else abs(float(data.mu))
    if data.variable_mu and np.any(np.asarray(data.mu) < 0):
        raise ConfigError("the bracket needs mu(x) >= 0")
    slope = mu_bar * data.A.upper / data.A.lower
    return data.replace(c0=np.abs(data.c0), f=np.abs(data.f), mu=slope, mu_bounds=None)


def build_bracket(data, choice=HChoice(), tol=1e-9, rho=None):
    """Return ``(u_lower, u_upper, extremal_result)``.

    ``u_upper`` solves the extremal equation on the minimizer branch and is
    checked to be a supersolution of the user's equation (residual
    ``>= -1e-8``); ``u_lower = -u_upper`` must be a subsolution.
    """
    from .pipeline import solve_model_min

    ext = bracket_problem(data)
    if not np.any(ext.c0) and not np.any(ext.f):
        z = data.grid.zeros()
        return z, z.copy(), None
    res = solve_model_min(ext, rho=rho, tol=tol)
    res.extra["slope"] = float(ext.mu)
    upper = res.u
    if upper.min() < -BRACKET_TOL:
        raise CertificateError(
            f"extremal solution is negative somewhere (min {upper.min():.3e})", "bracket"
        )
    upper = np.maximum(upper, 0.0)
    lower = -upper
    r_up = u_residual(data, upper, choice)
    r_lo = u_residual(data, lower, choice)
    if r_up.min() < -BRACKET_TOL:
        node = data.grid.multi_index(int(np.argmin(r_up)))
        raise CertificateError(
            f"supersolution inequality fails at node {node} (residual {r_up.min():.3e})", "bracket"
        )
    if r_lo.max() > BRACKET_TOL:
        node = data.grid.multi_index(int(np.argmax(r_lo)))
        raise CertificateError(
            f"subsolution inequality fails at node {node} (residual {r_lo.max():.3e})", "bracket"
        )
    return lower, upper, res


def solve_general(data, choice=HChoice(), tol=1e-12, max_iter=100, bracket=None, rho=None):
    """Clamped damped Newton on ``L u = H(x, u, grad_h u)`` from ``u = 0``.

    Every iterate is projected into the bracket ``[u_lower, u_upper]``; a
    projected step that does not reduce the residual is halved. Failure to
    converge raises :class:`ConvergenceError` (existence is known, an
    algorithm is not).
    """
    grid = data.grid
    lower, upper, ext = build_bracket(data, choice, rho=rho) if bracket is None else (*bracket, None)
    u = np.clip(grid.zeros(), lower, upper)
    r, J = u_residual(data, u, choice, jacobian=True)
    rn = residual_norm(r, u, grid)
    history = [{"iteration": 0, "residual": rn}]
    it = 0
    while rn > tol:
        if it >= max_iter:
            raise ConvergenceError(f"general Newton: max iterations (residual {rn:.3e})", "solve_general")
        it += 1
        solve, _ = factorize(J)
        du = -solve(r.ravel()).reshape(grid.shape)
        phi0 = float(np.sum(r * r))
        alpha = 1.0
        while True:
            trial = np.clip(u + alpha * du, lower, upper)
            try:
                r_t, J_t = u_residual(data, trial, choice, jacobian=True)
                phi = float(np.sum(r_t * r_t))
            except FloatingPointError:
                phi = np.inf
            if np.isfinite(phi) and phi <= (1.0 - 2.0 * ARMIJO_C * alpha) * phi0:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                raise ConvergenceError(
                    f"general Newton: line search failed inside the bracket (residual {rn:.3e})",
                    "solve_general",
                )
        u, r, J = trial, r_t, J_t
        rn = residual_norm(r, u, grid)
        history.append({"iteration": it, "residual": rn, "step": alpha})
    ok = bool(np.all(u >= lower - CONTAIN_TOL) and np.all(u <= upper + CONTAIN_TOL))
    return SolveResult(
        kind="Bracketed",
        u=u,
        iterations=it,
        residual_norm=rn,
        min_v=None,
        converged=True,
        bracket_ok=ok,
        history=history,
        extra={
            "u_lower": lower,
            "u_upper": upper,
            "scheme": choice.scheme,
            "H": choice.kind,
            "extremal_slope": None if ext is None else ext.extra["slope"],
        },
    )


def transform_residual(data, v, scheme="centered"):
    """Residual of ``u = v_to_u(v)`` in the discrete ``u``-equation (transform coherence)."""
    u = nl.v_to_u(v, data.mu)
    return u_residual(data, u, HChoice(scheme=scheme))
