"""Scalar calculus of the transformed problem.

With ``x = mu * s`` the nonlinearity is ``g(s) = phi(x) / mu`` where
``phi(x) = (1 + x) ln(1 + x) - x`` for ``x > -1`` and ``phi(x) = -x`` otherwise.
Everything here is vectorized; ``mu`` may be a scalar or a nodal array
broadcastable against ``s``.
"""

import dataclasses

import numpy as np
from scipy.special import xlogy

from .exceptions import DomainViolation
from .validation import check_mu

#: magnitude cap for ``g'`` at and just above the kink ``s = -1/mu``
DERIVATIVE_CAP = 1e6

# below this |x| the closed forms lose digits to cancellation; use series
_SERIES_CUTOFF = 1e-2
_SERIES_TERMS = 12


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def _phi_series(x):
    # (1+x)ln(1+x) - x = sum_{k>=2} (-1)^k x^k / (k (k-1))
    out = np.zeros_like(x)
    for k in range(_SERIES_TERMS, 1, -1):
        out = out + (-1.0) ** k * x**k / (k * (k - 1))
    return out


def _Phi_series(x):
    # integral_0^x phi = sum_{k>=2} (-1)^k x^(k+1) / ((k+1) k (k-1))
    out = np.zeros_like(x)
    for k in range(_SERIES_TERMS, 1, -1):
        out = out + (-1.0) ** k * x ** (k + 1) / ((k + 1) * k * (k - 1))
    return out


def _split(s, mu):
    mu = check_mu(mu)
    s = np.asarray(s, dtype=float)
    x = np.asarray(mu * s, dtype=float)
    return s, np.broadcast_to(np.asarray(mu, dtype=float), x.shape), x


def g(s, mu):
    """``(1/mu)(1 + mu s) ln(1 + mu s) - s`` for ``s > -1/mu``, ``-s`` otherwise."""
    s, mu, x = _split(s, mu)
    t = 1.0 + x
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = xlogy(t, t) - x
    small = np.abs(x) < _SERIES_CUTOFF
    phi = np.where(x > -1.0, np.where(small, _phi_series(np.where(small, x, 0.0)), closed), -x)
    return _out(phi / mu)


def g_prime(s, mu, cap=DERIVATIVE_CAP):
    """``ln(1 + mu s)`` above the kink, ``-1`` below it, ``-cap`` at it."""
    s, mu, x = _split(s, mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        above = np.maximum(np.log1p(np.where(x > -1.0, x, 0.0)), -cap)
    out = np.where(x > -1.0, above, np.where(x < -1.0, -1.0, -cap))
    return _out(out)


def G(s, mu):
    """Antiderivative of :func:`g` with ``G(0) = 0`` (closed form)."""
    s, mu, x = _split(s, mu)
    t = 1.0 + x
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = 0.5 * xlogy(t * t, t) - 0.25 * t * t + 0.25 - 0.5 * x * x
    small = np.abs(x) < _SERIES_CUTOFF
    Phi = np.where(
        x > -1.0,
        np.where(small, _Phi_series(np.where(small, x, 0.0)), closed),
        0.25 - 0.5 * x * x,
    )
    return _out(Phi / mu**2)


def H(s, mu):
    """``g(s) s / 2 - G(s)``; equal to ``-1/(4 mu^2)`` for ``s <= -1/mu``."""
    s_arr = np.asarray(s, dtype=float)
    return _out(0.5 * np.asarray(g(s, mu)) * s_arr - np.asarray(G(s, mu)))


def H_floor(mu):
    """Constant value of ``H`` on ``s <= -1/mu``, written as ``-G(-1/mu) - 1/(2 mu^2)``."""
    mu = check_mu(mu)
    return _out(-np.asarray(G(-1.0 / np.asarray(mu, dtype=float), mu)) - 0.5 / np.asarray(mu) ** 2)


def v_to_u(v, mu):
    """Logarithmic map ``u = ln(1 + mu v) / mu``; requires ``v > -1/mu`` at every node."""
    mu = check_mu(mu)
    v = np.asarray(v, dtype=float)
    x = mu * v
    if np.any(x <= -1.0):
        worst = float(np.min(x))
        raise DomainViolation(f"v <= -1/mu at some node (min mu*v = {worst:.6g})")
    return _out(np.log1p(x) / mu)


def u_to_v(u, mu):
    """Exponential change of unknown ``v = (exp(mu u) - 1) / mu``."""
    mu = check_mu(mu)
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        v = np.expm1(mu * u) / mu
    if not np.all(np.isfinite(v)):
        raise OverflowError("exp(mu u) overflows double precision")
    return _out(v)


def sign_normalize(problem):
    """Map a ``mu < 0`` instance to ``mu > 0`` by ``(mu, f) -> (-mu, -f)``.

    Returns ``(problem, flipped)``. Solutions of the returned problem must be
    negated to solve the original one.
    """
    mu = np.asarray(problem.mu, dtype=float)
    if np.any(mu == 0):
        raise ValueError("multiplicity requires mu != 0")
    if np.all(mu > 0):
        return problem, False
    if np.all(mu < 0):
        new_mu = -problem.mu if np.ndim(problem.mu) else -float(problem.mu)
        return dataclasses.replace(problem, mu=new_mu, f=-problem.f), True
    raise ValueError("mu changes sign across the domain; no sign reduction applies")
