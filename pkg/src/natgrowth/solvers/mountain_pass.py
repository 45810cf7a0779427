"""Saddle search by deforming a discrete path from ``0`` to ``v0``.

Each sweep takes the highest node of the path, moves it by an Armijo
descent step of the energy (Sobolev gradient with the path tangent
projected out), slides it to the maximum of the energy along the
polyline through its two neighbours and re-spaces the rest of the path to
near-uniform arclength in the energy norm, keeping the peak as a node. The
path maximum is non-increasing: a move that would raise it is shortened. Once the highest node is close to critical it is polished by
Newton's method.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..energy import energy_gradient, energy_value, residual_norm, sobolev_gradient
from ..exceptions import ConvergenceError, PathCollapseError
from ..grid import h1_norm, inner
from ..validation import check_field
from .newton import newton_transformed
from .result import SolveResult

ARMIJO_C = 1e-4
#: tolerance on the (relative) non-increase of the path maximum
MAX_TOL = 1e-12


@dataclass
class PathState:
    """Nodes of a discrete path; the first is 0 and the last is ``v0``."""

    nodes: list
    energies: np.ndarray

    @property
    def peak(self):
        """Index of the highest node (lowest index on ties)."""
        return int(np.argmax(self.energies))

    @property
    def max_energy(self):
        return float(self.energies.max())


def initial_path(data, v0, n_path):
    if n_path < 3:
        raise ValueError("a path needs at least 3 nodes")
    ts = np.linspace(0.0, 1.0, n_path)
    nodes = [t * v0 for t in ts]
    nodes[0] = np.zeros_like(v0)
    nodes[-1] = v0.copy()
    return PathState(nodes, np.array([energy_value(p, data) for p in nodes]))


def segment_lengths(data, path):
    nodes = path.nodes
    return np.array([h1_norm(data.A, b - a) for a, b in zip(nodes[:-1], nodes[1:])])


def _interpolate(nodes, s, targets):
    seg = np.diff(s)
    out = []
    for t in targets:
        k = min(int(np.searchsorted(s, t, side="right")) - 1, len(seg) - 1)
        w = (t - s[k]) / seg[k] if seg[k] > 0 else 0.0
        out.append((1.0 - w) * nodes[k] + w * nodes[k + 1])
    return out


def respace(data, path, pin=None):
    """Piecewise-linear re-interpolation to uniform energy-norm arclength.

    With ``pin`` the node ``path.nodes[pin]`` is kept exactly and becomes
    node ``j``, ``j`` chosen so both sides are uniform with nearly equal
    spacing.
    """
    nodes = path.nodes
    n = len(nodes)
    s = np.concatenate([[0.0], np.cumsum(segment_lengths(data, path))])
    if s[-1] == 0.0:
        return path
    if pin is None:
        new = [nodes[0]] + _interpolate(nodes, s, np.linspace(0.0, s[-1], n)[1:-1]) + [nodes[-1]]
        kept = {0: path.energies[0], n - 1: path.energies[-1]}
    else:
        j = int(np.clip(round(s[pin] / s[-1] * (n - 1)), 1, n - 2))
        left = _interpolate(nodes, s, np.linspace(0.0, s[pin], j + 1)[1:-1])
        right = _interpolate(nodes, s, np.linspace(s[pin], s[-1], n - j)[1:-1])
        new = [nodes[0]] + left + [nodes[pin]] + right + [nodes[-1]]
        kept = {0: path.energies[0], j: path.energies[pin], n - 1: path.energies[-1]}
    energies = np.array([kept[i] if i in kept else energy_value(p, data) for i, p in enumerate(new)])
    return PathState(new, energies)


def slide_to_max(data, path, k):
    """Move node ``k`` to the energy maximum on the polyline ``k-1, k, k+1``."""
    a, v, b = path.nodes[k - 1], path.nodes[k], path.nodes[k + 1]

    def point(s):
        return v + s * (b - v) if s >= 0 else v - s * (a - v)

    res = minimize_scalar(
        lambda s: -energy_value(point(s), data),
        bounds=(-0.5, 0.5),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if -res.fun > path.energies[k]:
        path.nodes[k] = point(res.x)
        path.energies[k] = -res.fun


def _tangent(data, path, k):
    t = path.nodes[k + 1] - path.nodes[k - 1]
    n = h1_norm(data.A, t)
    return t / n if n > 0 else t


def mountain_pass(
    data,
    v0,
    n_path=21,
    tol=1e-9,
    path_tol=1e-3,
    max_sweeps=3000,
    polish_tol=1e-12,
    step_fraction=0.5,
    record_profiles=True,
):
    """Approximate the mountain-pass critical point between ``0`` and ``v0``.

    Parameters
    ----------
    n_path : int
        Number of path nodes (endpoints included).
    tol : float
        Required scaled residual of the returned (polished) point.
    path_tol : float
        Residual at which path deformation hands over to Newton.
    step_fraction : float
        Cap on a single move of the peak, relative to the distance to its
        nearest path neighbour; larger moves let the path jump the ridge.

    The returned ``history`` logs, per sweep, the peak residual, the peak
    energy and the Cerami quantity ``(1 + ||v||) ||I'(v)||``.
    """
    grid = data.grid
    v0 = check_field(grid, v0, "v0")
    if energy_value(v0, data) > 0:
        raise ValueError("endpoint v0 must satisfy I(v0) <= 0")
    path = initial_path(data, v0, n_path)
    slide_to_max(data, path, path.peak)
    history = []
    profiles = []
    alpha = 1.0
    sweeps = 0
    message = "max-sweeps"
    while True:
        k = path.peak
        if k in (0, len(path.nodes) - 1):
            raise PathCollapseError("path maximum reached an endpoint; geometry lost", "mountain_pass")
        v = path.nodes[k]
        r = energy_gradient(v, data)
        rn = residual_norm(r, v, grid)
        cerami = (1.0 + h1_norm(data.A, v)) * rn
        history.append(
            {"iteration": sweeps, "residual": rn, "energy": path.max_energy, "cerami": cerami, "peak": k}
        )
        if record_profiles:
            profiles.append(path.energies.copy())
        if rn <= path_tol:
            message = "path-converged"
            break
        if sweeps >= max_sweeps:
            break
        sweeps += 1
        tau = _tangent(data, path, k)
        d = -sobolev_gradient(r, data)
        d -= inner(grid, data.A.stiffness @ d.ravel(), tau) * tau
        spacing = min(
            h1_norm(data.A, path.nodes[k + 1] - v), h1_norm(data.A, v - path.nodes[k - 1])
        )
        dnorm = h1_norm(data.A, d)
        if dnorm > 0:
            alpha = min(alpha, step_fraction * spacing / dnorm)
        slope = inner(grid, r, d)
        E = path.energies[k]
        old_max = path.max_energy
        moved = None
        while alpha > 1e-14:
            trial = v + alpha * d
            E_trial = energy_value(trial, data)
            if E_trial <= E + ARMIJO_C * alpha * slope:
                cand = PathState(list(path.nodes), path.energies.copy())
                cand.nodes[k] = trial
                cand.energies[k] = E_trial
                slide_to_max(data, cand, k)
                cand = respace(data, cand, pin=k)
                if cand.max_energy <= old_max + MAX_TOL * max(1.0, abs(old_max)):
                    moved = cand
                    break
            alpha *= 0.5
        if moved is None:
            message = "line-search-stalled"
            break
        path = moved
        alpha = min(1.0, 2.0 * alpha)

    v_peak = path.nodes[path.peak]
    pol = newton_transformed(data, v_peak, tol=polish_tol)
    v, rn = (pol.v, pol.residual_norm) if pol.residual_norm < rn else (v_peak, rn)
    E = energy_value(v, data)
    if rn > tol:
        raise ConvergenceError(
            f"mountain-pass point not converged (residual {rn:.3e} > {tol:.1e}; {message})",
            "mountain_pass",
        )
    if not E > 0:
        raise ConvergenceError(
            f"polished point has energy {E:.6g} <= 0; Newton left the mountain-pass level",
            "mountain_pass",
        )
    final_cerami = (1.0 + h1_norm(data.A, v)) * rn
    return SolveResult(
        kind="MountainPass",
        v=v,
        iterations=sweeps,
        residual_norm=rn,
        energy=E,
        min_v=float(v.min()),
        converged=True,
        message=message,
        history=history,
        extra={
            "path_max_energy": path.max_energy,
            "newton_iterations": pol.iterations,
            "cerami_final": final_cerami,
            "norm": h1_norm(data.A, v),
            "path_profiles": profiles,
            "path": path,
        },
    )
