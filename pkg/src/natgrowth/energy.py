"""The energy functional, its gradient, coercivity and hypothesis diagnostics.

The functional is

    I(v) = 1/2 int (<A grad v, grad v> - (c0 + mu f) v^2) - int c0 G(v) - int f v

whose gradient (under the quadrature pairing) is the nodal residual of
``-div(A grad v) - (c0 + mu f) v = c0 g(v) + f``.
"""

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import nonlinearity as nl
from .exceptions import GeometryNotFound
from .grid import MatrixField, h1_norm, inner, lp_norm
from .linalg import largest_pencil_eigenvalue, smallest_eigenvalue
from .validation import check_field

#: Lebesgue exponent standing in for N/2 when testing smallness hypotheses
SLOT_EXPONENT = 1.5
#: Sobolev exponent 2* (= 6 for N = 3, kept as a convention for N < 3)
SOBOLEV_EXPONENT = 6.0


@dataclass
class EnergyBreakdown:
    quadratic: float
    g_term: float
    linear: float
    total: float
    gradient_norm: float

    def as_dict(self):
        return asdict(self)


def _stiffness_energy(data, v):
    return inner(data.grid, data.A.stiffness @ v.ravel(), v)


def energy_value(v, data):
    """``I(v)`` as a float (fast path used inside the solvers)."""
    v = check_field(data.grid, v, "v")
    grid = data.grid
    quad = 0.5 * (_stiffness_energy(data, v) - inner(grid, (data.c0 + data.mu * data.f) * v, v))
    gterm = inner(grid, data.c0, nl.G(v, data.mu)) if np.any(data.c0) else 0.0
    total = quad - gterm - inner(grid, data.f, v)
    if not np.isfinite(total):
        raise FloatingPointError("energy overflowed")
    return total


def energy(v, data):
    """Evaluate ``I(v)`` and its parts; ``gradient_norm`` is the dual (H^-1) norm of ``I'(v)``."""
    v = check_field(data.grid, v, "v")
    grid = data.grid
    quad = 0.5 * (_stiffness_energy(data, v) - inner(grid, (data.c0 + data.mu * data.f) * v, v))
    gterm = inner(grid, data.c0, nl.G(v, data.mu)) if np.any(data.c0) else 0.0
    lin = inner(grid, data.f, v)
    total = quad - gterm - lin
    if not np.isfinite(total):
        raise FloatingPointError("energy overflowed")
    return EnergyBreakdown(quad, gterm, lin, total, dual_norm(energy_gradient(v, data), data))


def energy_gradient(v, data):
    """Nodal residual ``L v - (c0 + mu f) v - c0 g(v) - f``.

    ``inner(grid, energy_gradient(v), phi)`` is the directional derivative of
    :func:`energy` at ``v`` along ``phi``.
    """
    v = check_field(data.grid, v, "v")
    r = (data.A.stiffness @ v.ravel()).reshape(v.shape)
    r -= (data.c0 + data.mu * data.f) * v + data.f
    if np.any(data.c0):
        r -= data.c0 * nl.g(v, data.mu)
    return r


def sobolev_gradient(r, data):
    """Riesz representative ``L^{-1} r`` of a residual in the energy inner product."""
    return data.A.stiffness_lu.solve(np.ravel(r)).reshape(data.grid.shape)


def dual_norm(r, data):
    """``sup_phi <r, phi> / ||phi||``, i.e. ``sqrt(<r, L^{-1} r>)``."""
    return float(np.sqrt(max(inner(data.grid, r, sobolev_gradient(r, data)), 0.0)))


def residual_norm(r, v, grid):
    """Scaled residual ``||r||_2 / (1 + ||v||_2)`` (L2 norms under quadrature)."""
    return lp_norm(grid, r, 2) / (1.0 + lp_norm(grid, v, 2))


def coercivity_lambda(weight, data, tol=1e-10, max_iter=10_000, seed=0):
    """``inf_v (||v||^2 - int weight v^2) / ||v||^2`` over the discrete space.

    Computed as ``1 - sigma_max`` where ``sigma_max`` is the largest
    eigenvalue of the pencil ``(diag(weight), L)``, by shifted power iteration.
    """
    w = check_field(data.grid, weight, "weight", allow_scalar=True).ravel()
    if not np.any(w):
        return 1.0
    L = data.A.stiffness
    solve = data.A.stiffness_lu.solve
    shift = 0.0
    if w.min() < 0:
        lam1 = smallest_eigenvalue(L, solve, tol=tol, max_iter=max_iter, seed=seed)
        shift = 1.01 * (-w.min()) / lam1
    sigma, _ = largest_pencil_eigenvalue(
        lambda x: w * x, solve, L, tol=tol, max_iter=max_iter, shift=shift, seed=seed
    )
    return 1.0 - sigma


@lru_cache(maxsize=16)
def _laplacian(grid):
    return MatrixField.identity(grid)


def sobolev_quotient(v, grid, q=SOBOLEV_EXPONENT):
    """``||v||_q / ||grad v||_2`` for the plain Laplacian energy."""
    lap = _laplacian(grid)
    return lp_norm(grid, v, q) / h1_norm(lap, v)


def sobolev_ratio(data, starts=5, max_iter=300, seed=0, q=SOBOLEV_EXPONENT):
    """Best discrete Sobolev ratio ``max ||v||_q / ||grad v||_2`` found by ascent.

    Each start runs projected ascent in the H^1 metric (iterates normalized to
    the unit energy sphere) with step halving; the best quotient seen over all
    iterates and starts is returned. This is a lower bound for the true
    discrete constant.
    """
    grid = data.grid
    lap = _laplacian(grid)
    L = lap.stiffness
    solve = lap.stiffness_lu.solve
    vol = grid.cell_volume
    rng = np.random.default_rng(seed)
    best = 0.0

    def log_quotient(x):
        e = vol * float(x @ (L @ x))
        return np.log(vol * np.sum(np.abs(x) ** q)) / q - 0.5 * np.log(e)

    for _ in range(starts):
        x = solve(rng.random(grid.size))
        x /= np.sqrt(vol * float(x @ (L @ x)))
        F = log_quotient(x)
        step = 1.0
        for _ in range(max_iter):
            s6 = vol * np.sum(np.abs(x) ** q)
            grad = solve(np.abs(x) ** (q - 2) * x / s6) - x
            while step > 1e-12:
                y = x + step * grad
                y /= np.sqrt(vol * float(y @ (L @ y)))
                Fy = log_quotient(y)
                if Fy > F:
                    break
                step *= 0.5
            else:
                break
            gain = Fy - F
            x, F = y, Fy
            step = min(1.0, 2 * step)
            if gain < 1e-13:
                break
        best = max(best, float(np.exp(F)))
    return best


@dataclass
class HypothesisReport:
    """Measured quantities behind the smallness and coercivity hypotheses.

    Norms use the sign-normalized data (``|mu|`` and ``sgn(mu) f``). The
    discrete Sobolev ratio ``sobolev_ratio`` stands in for the optimal
    continuum constant; ``ellipticity`` is the lower bound of ``A``.
    """

    dimension: int
    p: float
    mu: float
    ellipticity: float
    c0_norm_p: float
    f_norm_slot: float
    f_plus_norm_slot: float
    f_minus_norm_slot: float
    f_minus_norm_p: float
    c0_mu_fplus_norm_slot: float
    sobolev_ratio: float
    margin: float
    coercivity_lambda: float
    multiplicity_mode: bool
    h1_ok: bool
    h2_ok: bool
    h2prime_ok: bool
    coercive_ok: bool

    @property
    def passed(self):
        return self.h1_ok and self.h2_ok and self.coercive_ok

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def check_hypotheses(data, sobolev_starts=5, seed=0):
    """Measure all hypothesis quantities; failures are reported, never raised."""
    grid = data.grid
    mu_arr = np.asarray(data.mu, dtype=float)
    h1_ok = bool(np.all(mu_arr != 0) and (np.all(mu_arr > 0) or np.all(mu_arr < 0)))
    sgn = 1.0 if np.all(mu_arr >= 0) else -1.0
    mu_abs = np.abs(data.mu) if np.ndim(data.mu) else abs(float(data.mu))
    mu_max = float(np.max(np.abs(mu_arr)))
    fs = sgn * data.f
    f_plus, f_minus = np.maximum(fs, 0.0), np.maximum(-fs, 0.0)
    slot = SLOT_EXPONENT
    C_h = sobolev_ratio(data, starts=sobolev_starts, seed=seed)
    bound = data.A.lower / C_h
    f_slot = lp_norm(grid, data.f, slot)
    weight = data.c0 + mu_abs * f_plus
    lam = coercivity_lambda(weight, data, seed=seed)
    return HypothesisReport(
        dimension=grid.ndim,
        p=float(data.p),
        mu=float(np.max(mu_arr)) if sgn > 0 else float(np.min(mu_arr)),
        ellipticity=data.A.lower,
        c0_norm_p=lp_norm(grid, data.c0, data.p),
        f_norm_slot=f_slot,
        f_plus_norm_slot=lp_norm(grid, f_plus, slot),
        f_minus_norm_slot=lp_norm(grid, f_minus, slot),
        f_minus_norm_p=lp_norm(grid, f_minus, data.p),
        c0_mu_fplus_norm_slot=lp_norm(grid, weight, slot),
        sobolev_ratio=C_h,
        margin=bound - mu_max * f_slot,
        coercivity_lambda=lam,
        multiplicity_mode=data.multiplicity_mode,
        h1_ok=h1_ok,
        h2_ok=bool(mu_max * f_slot < bound),
        h2prime_ok=bool(lp_norm(grid, weight, slot) < bound),
        coercive_ok=bool(lam > 0),
    )


def ray_scan(v, data, ts):
    """``[(t, I(t v)) for t in ts]``."""
    v = check_field(data.grid, v, "v")
    out = []
    for t in ts:
        t = float(t)
        if not np.isfinite(t):
            raise ValueError("ray parameters must be finite")
        out.append((t, energy_value(t * v, data)))
    return out


def bump_direction(data, width=0.15):
    """Nonnegative bump centred at the (first) maximizer of ``c0``, max value 1.

    A Gaussian of relative ``width`` times the principal sine envelope, so it
    vanishes on the boundary.
    """
    grid = data.grid
    center = [grid.coordinates(k)[i] for k, i in enumerate(grid.multi_index(np.argmax(data.c0)))]
    L = grid.lengths

    def shape(*x):
        out = 1.0
        for xk, ck, Lk in zip(x, center, L):
            out = out * np.exp(-((xk - ck) ** 2) / (2 * (width * Lk) ** 2)) * np.sin(np.pi * xk / Lk)
        return out

    phi = grid.sample(shape)
    return phi / phi.max()


def principal_direction(data, tol=1e-8, max_iter=500):
    """Nonnegative principal eigenvector of ``L phi = sigma c0 phi``, max value 1.

    Power iteration on ``L^{-1} diag(c0)`` started from :func:`bump_direction`.
    Among nonnegative directions it maximizes ``int c0 phi^2 / ||phi||^2``,
    so the ray through it crosses the energy ridge near its lowest pass.
    """
    c0 = data.c0.ravel()
    lu = data.A.stiffness_lu
    phi = bump_direction(data).ravel()
    for _ in range(max_iter):
        new = np.maximum(lu.solve(c0 * phi), 0.0)
        new /= new.max()
        done = np.max(np.abs(new - phi)) <= tol
        phi = new
        if done:
            break
    return phi.reshape(data.grid.shape)


def find_v0(data, rho, max_doublings=60):
    """Return ``t * phi`` with ``I(t phi) <= 0`` and ``||t phi|| > rho``, ``t = 2^k``.

    ``phi`` is :func:`principal_direction`, a nonnegative bump peaked where
    ``c0`` concentrates. Raises :class:`GeometryNotFound` if
    ``2^max_doublings`` is exceeded or ``c0`` gives the bump no weight.
    """
    if not np.any(data.c0 > 0):
        raise GeometryNotFound("c0 has no positive part; I(t phi) stays coercive", "find_v0")
    phi = principal_direction(data)
    if not inner(data.grid, data.c0, phi) > 0:
        raise GeometryNotFound("c0 has no mass under the bump; I(t phi) stays coercive", "find_v0")
    nphi = h1_norm(data.A, phi)
    t = 1.0
    for _ in range(max_doublings + 1):
        v0 = t * phi
        if t * nphi > rho and energy_value(v0, data) <= 0.0:
            return v0
        t *= 2.0
    raise GeometryNotFound(
        f"I(t phi) > 0 for all t <= 2^{max_doublings}; c0 too small or misaligned", "find_v0"
    )
