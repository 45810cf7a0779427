"""Krylov and power-iteration kernels.

Kept free of problem semantics: everything takes sparse matrices, callables
and flat vectors.
"""

import numpy as np

from .exceptions import ConvergenceError


def conjugate_gradient(A, b, x0=None, rtol=1e-12, max_iter=None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    ``A`` may be a matrix or a callable returning ``A @ x``. Returns
    ``(x, iterations, relative_residual)``. Raises :class:`ConvergenceError`
    on stagnation or loss of positive definiteness.
    """
    matvec = A if callable(A) else (lambda x: A @ x)
    b = np.asarray(b, dtype=float)
    n = b.size
    max_iter = 10 * n if max_iter is None else max_iter
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    r = b - matvec(x)
    d = r.copy()
    rr = float(r @ r)
    for k in range(1, max_iter + 1):
        Ad = matvec(d)
        dAd = float(d @ Ad)
        if dAd <= 0.0:
            raise ConvergenceError("operator is not positive definite (d^T A d <= 0)")
        alpha = rr / dAd
        x += alpha * d
        r -= alpha * Ad
        rr_new = float(r @ r)
        if np.sqrt(rr_new) <= rtol * bnorm:
            # guard against drift of the recursive residual
            true_res = np.linalg.norm(b - matvec(x))
            if true_res <= 10 * rtol * bnorm:
                return x, k, true_res / bnorm
            r = b - matvec(x)
            rr_new = float(r @ r)
            d = r.copy()
            rr = rr_new
            continue
        d = r + (rr_new / rr) * d
        rr = rr_new
    res = np.linalg.norm(b - matvec(x)) / bnorm
    raise ConvergenceError(f"CG stagnated after {max_iter} iterations (relative residual {res:.3e})")


def largest_pencil_eigenvalue(W, solve_L, L, tol=1e-10, max_iter=10_000, shift=0.0, seed=0):
    """Largest ``sigma`` with ``W x = sigma L x`` for SPD ``L`` and symmetric ``W``.

    Power iteration on ``L^{-1} W + shift I``; ``shift`` must make that
    operator's spectrum nonnegative. ``W`` is a matrix or callable, ``L`` a
    sparse matrix and ``solve_L`` applies ``L^{-1}``. The eigenvalue estimate is the
    generalized Rayleigh quotient.
    """
    Wm = W if callable(W) else (lambda x: W @ x)
    Lm = lambda x: L @ x  # noqa: E731
    rng = np.random.default_rng(seed)
    n = L.shape[0]
    x = 1.0 + 0.1 * rng.random(n)
    x /= np.sqrt(x @ Lm(x))
    sigma = float(x @ Wm(x))
    for k in range(1, max_iter + 1):
        y = solve_L(Wm(x)) + shift * x
        ynorm = np.sqrt(float(y @ Lm(y)))
        if ynorm == 0.0:
            return 0.0, k
        x = y / ynorm
        sigma_new = float(x @ Wm(x))
        if abs(sigma_new - sigma) <= tol * max(1.0, abs(sigma_new)):
            return sigma_new, k
        sigma = sigma_new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


def smallest_eigenvalue(L, solve_L, tol=1e-10, max_iter=10_000, seed=0):
    """Smallest eigenvalue of SPD ``L`` by inverse power iteration."""
    n = L.shape[0]
    ident = lambda x: x  # noqa: E731
    # W = I: largest sigma of x = sigma L x is 1 / lambda_min(L)
    sigma, _ = largest_pencil_eigenvalue(ident, solve_L, L, tol=tol, max_iter=max_iter, seed=seed)
    if n == 0 or sigma <= 0:
        raise ConvergenceError("inverse power iteration failed")
    return 1.0 / sigma
