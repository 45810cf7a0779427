"""Finite-sample property suites for the nonlinearity and the energy gradient.

Each check returns a :class:`PropertyResult`; the suites are what the
``props`` mode runs and tabulates.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import nonlinearity as nl
from .energy import energy_gradient, energy_value
from .grid import Grid, inner
from .problem import ProblemData


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str


def sample_grid():
    """Log-spaced ``s in +-[1e-8, 1e6]`` plus zero."""
    pos = np.logspace(-8, 6, 141)
    return np.concatenate([-pos[::-1], [0.0], pos])


def positivity(mu=1.0):
    s = sample_grid()
    gs = np.asarray(nl.g(s, mu))
    nz = s != 0
    ok = bool(np.all(gs[nz] > 0) and nl.g(0.0, mu) == 0.0)
    return PropertyResult("g > 0 off zero, g(0) = 0", ok, f"min g on s != 0: {gs[nz].min():.3e}")


def growth(mu=1.0, r=1.5, bound=10.0):
    s = sample_grid()
    s = s[s != 0]
    ratio = np.abs(nl.g(s, mu)) / np.abs(s) ** r
    return PropertyResult(
        f"|g(s)| / |s|^{r} bounded", bool(ratio.max() <= bound), f"max ratio {ratio.max():.4g}"
    )


def small_decay(mu=1.0):
    s = np.array([1e-1, 1e-2, 1e-3])
    q = np.abs(nl.g(s, mu) / s)
    ok = bool(np.all(np.diff(q) < 0) and q[-1] < 1e-2)
    return PropertyResult("g(s)/s -> 0 as s -> 0", ok, "g(s)/s = " + ", ".join(f"{x:.3e}" for x in q))


def superlinear(mu=1.0):
    s = np.array([10.0, 1e3, 1e5])
    a = nl.g(s, mu) / s
    b = nl.G(s, mu) / s**2
    ok = bool(np.all(np.diff(a) > 0) and np.all(np.diff(b) > 0))
    return PropertyResult(
        "g(s)/s and G(s)/s^2 increase",
        ok,
        "g/s = " + ", ".join(f"{x:.4g}" for x in a) + "; G/s^2 = " + ", ".join(f"{x:.4g}" for x in b),
    )


def scaling(mu=1.0):
    s = np.linspace(0.0, 50.0, 201)
    Hs = np.asarray(nl.H(s, mu))
    S, T = np.meshgrid(s, s, indexing="ij")
    HS, HT = np.meshgrid(Hs, Hs, indexing="ij")
    mask = (S <= T) & (T > 0)
    slack = (S / np.where(T > 0, T, 1.0)) * HT - HS
    tol = 1e-12 * (1.0 + np.abs(HT))
    ok = bool(np.all(slack[mask] >= -tol[mask]))
    return PropertyResult("H(s) <= (s/t) H(t) for 0 <= s <= t", ok, f"min slack {slack[mask].min():.3e}")


def plateau(mu=1.0):
    s = -1.0 / mu - np.logspace(-8, 6, 60)
    Hs = np.asarray(nl.H(s, mu))
    ref = nl.H(-1.0 / mu, mu)
    dev = np.max(np.abs(Hs - ref))
    return PropertyResult("H constant on s <= -1/mu", bool(dev == 0.0), f"max deviation {dev:.3e}")


LEMMA_CHECKS = (positivity, growth, small_decay, superlinear, scaling, plateau)


def derivative_consistency(mu=1.0, eps=(1e-3, 1e-4)):
    """Central differences of ``g`` and ``G`` versus ``g'`` and ``g``, shrinking like ``eps^2``."""
    s = np.array([-0.9, -0.5, -0.1, 0.1, 0.5, 1.0, 3.0, 10.0]) / mu
    s = np.concatenate([s, [-2.0 / mu, -5.0 / mu]])
    errs = []
    for e in eps:
        dg = (np.asarray(nl.g(s + e, mu)) - nl.g(s - e, mu)) / (2 * e)
        dG = (np.asarray(nl.G(s + e, mu)) - nl.G(s - e, mu)) / (2 * e)
        errs.append(max(np.max(np.abs(dg - nl.g_prime(s, mu))), np.max(np.abs(dG - nl.g(s, mu)))))
    rate = errs[0] / max(errs[1], 1e-300)
    ok = bool(errs[1] < 1e-6 and (rate > 30 or errs[1] < 1e-10))
    return PropertyResult(
        "g' and G consistent with g (central differences)",
        ok,
        f"errors {errs[0]:.2e} -> {errs[1]:.2e} (ratio {rate:.1f})",
    )


def _g_scalar(t, mu):
    # plain transcription of g, kept apart from the vectorized production code
    x = mu * t
    return ((1.0 + x) * math.log1p(x) - x) / mu if x > -1.0 else -t


def quadrature_agreement(mus=(0.5, 1.0, 2.0), n=41, tol=1e-10):
    """Closed-form ``G`` against adaptive quadrature of ``g`` on ``[-5, 5]``."""
    worst = 0.0
    for mu in mus:
        kink = -1.0 / mu
        for s in np.linspace(-5.0, 5.0, n):
            pts = [kink] if min(0.0, s) < kink < max(0.0, s) else None
            with warnings.catch_warnings():
                # asking for 1e-14 makes quad report round-off it cannot beat
                warnings.simplefilter("ignore", IntegrationWarning)
                val, _ = quad(_g_scalar, 0.0, s, args=(mu,), points=pts, epsabs=1e-14, epsrel=1e-14, limit=200)
            worst = max(worst, abs(val - nl.G(s, mu)))
    return PropertyResult(f"closed-form G = quadrature (<= {tol:g})", bool(worst <= tol), f"max error {worst:.3e}")


def plateau_value(mus=(0.5, 1.0, 2.0)):
    """``H`` below the kink equals ``-G(-1/mu) - 1/(2 mu^2)``; ``-1/4`` for ``mu = 1``."""
    worst = 0.0
    for mu in mus:
        s = -1.0 / mu - np.array([0.0, 0.5, 3.0])
        worst = max(worst, float(np.max(np.abs(nl.H(s, mu) - nl.H_floor(mu)))))
    ok = worst <= 1e-12 and abs(nl.H_floor(1.0) + 0.25) <= 1e-10
    return PropertyResult("H plateau value", bool(ok), f"max deviation {worst:.3e}; H_floor(1) = {nl.H_floor(1.0)!r}")


def nonlinearity_suite(mu=1.0):
    return [check(mu) for check in LEMMA_CHECKS] + [
        derivative_consistency(mu),
        quadrature_agreement(),
        plateau_value(),
    ]


def gradient_problem(n=17):
    grid = Grid.box((n, n))
    c0 = grid.sample(lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / (2 * 0.2**2)))
    f = grid.sample(lambda x, y: 0.1 * np.sin(np.pi * x) * np.sin(np.pi * y))
    return ProblemData.model(grid, c0, f, 1.0)


def smooth_random_field(grid, rng, modes=4, scale=1.0):
    """Random combination of the lowest ``modes**N`` Dirichlet sine modes."""
    X = grid.mesh()
    out = np.zeros(grid.shape)
    for ks in np.ndindex(*(modes,) * grid.ndim):
        term = rng.standard_normal() / (1.0 + sum(ks))
        for k, x, L in zip(ks, X, grid.lengths):
            term = term * np.sin((k + 1) * np.pi * x / L)
        out += term
    return scale * out


def gradient_check(data=None, pairs=20, eps=(1e-2, 1e-3, 1e-4), seed=0, scale=1.0):
    """Central-difference directional derivatives of ``I`` against the nodal residual.

    Returns ``(errors, energies)``; ``errors[j, k]`` is the error of pair ``j``
    at ``eps[k]`` for random smooth ``(v, phi)``. Smooth probes keep
    ``I = O(1)``, so the ``eps^2`` truncation error stays visible above
    round-off at the larger steps.
    """
    data = gradient_problem() if data is None else data
    rng = np.random.default_rng(seed)
    grid = data.grid
    errs, Is = [], []
    for _ in range(pairs):
        v = smooth_random_field(grid, rng, scale=scale)
        phi = smooth_random_field(grid, rng)
        exact = inner(grid, energy_gradient(v, data), phi)
        row = []
        for e in eps:
            fd = (energy_value(v + e * phi, data) - energy_value(v - e * phi, data)) / (2 * e)
            row.append(abs(fd - exact))
        errs.append(row)
        Is.append(energy_value(v, data))
    return np.array(errs), np.array(Is)


def gradient_suite(seed=0):
    """Accuracy at ``eps = 1e-4``; order from the ``1e-2 -> 1e-3`` reduction (above round-off)."""
    errs, I = gradient_check(seed=seed)
    within = bool(np.all(errs[:, 2] <= 1e-6 * (1 + np.abs(I))))
    ratio = float(np.median(errs[:, 0] / np.maximum(errs[:, 1], 1e-300)))
    return [
        PropertyResult(
            "directional derivatives match the residual",
            within,
            f"max err / (1 + |I|) at eps=1e-4: {np.max(errs[:, 2] / (1 + np.abs(I))):.3e}",
        ),
        PropertyResult(
            "central-difference error is O(eps^2)",
            bool(50 <= ratio <= 200),
            f"median error ratio for eps 1e-2 -> 1e-3: {ratio:.1f}",
        ),
    ]


def run_all(seed=0):
    return [("nonlinearity", r) for r in nonlinearity_suite()] + [("gradient", r) for r in gradient_suite(seed)]
