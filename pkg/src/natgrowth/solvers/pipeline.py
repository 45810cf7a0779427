"""Two-solution pipeline for the model problem."""

import numpy as np

from .. import nonlinearity as nl
from ..energy import check_hypotheses, find_v0
from ..exceptions import CertificateError, ConvergenceError, HypothesisFailure, NatGrowthError
from ..grid import h1_norm
from .descent import minimize_local
from .linear import solve_linear
from .mountain_pass import mountain_pass

#: relative sup-norm separation required to call two solutions distinct
DISTINCT_TOL = 1e-4
RHO_FACTOR = 4.0
RHO_FLOOR = 1e-2


def default_rho(data):
    """``4 ||v_lin||`` with ``v_lin`` the solution of the ``c0 = 0`` problem (floor ``1e-2``)."""
    if not np.any(data.f):
        return RHO_FLOOR
    lin = solve_linear(data.mu * data.f, data.f, data)
    return max(RHO_FACTOR * h1_norm(data.A, lin.v), RHO_FLOOR)


def certify(result, mu):
    """Check ``min v > -1/(2 mu)`` and attach ``u``; raise :class:`CertificateError` otherwise."""
    bound = -0.5 / mu
    result.lower_bound_ok = bool(np.all(result.v > bound))
    if not result.lower_bound_ok:
        raise CertificateError(
            f"{result.kind}: min v = {result.min_v:.6g} <= -1/(2 mu) = {bound:.6g}", "certificate"
        )
    result.u = nl.v_to_u(result.v, mu)
    return result


def _staged(stage, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except NatGrowthError as exc:
        if exc.stage is None:
            exc.stage = stage
        raise


def _checked(data, require_hypotheses, report, need_multiplicity):
    work, flipped = nl.sign_normalize(data)
    if np.ndim(work.mu):
        raise HypothesisFailure("the variational solvers need a constant mu", "check")
    if need_multiplicity and not work.multiplicity_mode:
        raise HypothesisFailure("multiplicity needs c0 >= 0 and c0 not identically 0", "check")
    if report is None:
        report = check_hypotheses(work)
    if require_hypotheses and not report.passed:
        raise HypothesisFailure(
            f"hypothesis check failed (h1={report.h1_ok}, h2={report.h2_ok}, "
            f"coercive={report.coercive_ok})",
            "check",
        )
    return work, flipped


def _flip(res, flipped):
    res.extra["flipped"] = flipped
    if flipped:
        res.v = -res.v
        res.u = -res.u
        res.min_v = float(res.v.min())
    return res


def solve_model_min(data, rho=None, tol=1e-9, require_hypotheses=True, report=None):
    """Local minimizer branch alone: check, ``rho``, :func:`minimize_local`, certificate.

    Needs no sign condition on ``c0``; with ``c0 <= 0`` it is the unique
    solution.
    """
    work, flipped = _checked(data, require_hypotheses, report, need_multiplicity=False)
    rho = _staged("rho", default_rho, work) if rho is None else float(rho)
    res = _staged("minimize_local", minimize_local, work, rho, tol=tol)
    _staged("certificate", certify, res, work.mu)
    return _flip(res, flipped)


def solve_model_mp(
    data, rho=None, n_path=21, tol=1e-9, path_tol=1e-3, max_sweeps=3000, require_hypotheses=True,
    report=None,
):
    """Mountain-pass branch alone: check, ``rho``, :func:`find_v0`, path search, certificate."""
    work, flipped = _checked(data, require_hypotheses, report, need_multiplicity=True)
    rho = _staged("rho", default_rho, work) if rho is None else float(rho)
    v0 = _staged("find_v0", find_v0, work, rho)
    res = _staged(
        "mountain_pass", mountain_pass, work, v0,
        n_path=n_path, tol=tol, path_tol=path_tol, max_sweeps=max_sweeps,
    )
    _staged("certificate", certify, res, work.mu)
    res.extra["rho"] = rho
    res.extra["v0_scale"] = float(np.max(v0))
    res.extra["v0"] = v0
    return _flip(res, flipped)


def solve_model_both(
    data,
    rho=None,
    n_path=21,
    tol=1e-9,
    path_tol=1e-3,
    max_sweeps=3000,
    require_hypotheses=True,
    report=None,
):
    """Compute the local minimizer and the mountain-pass solution.

    Returns ``(minimizer, saddle)`` as :class:`SolveResult` objects carrying
    both ``v`` and ``u``. For ``mu < 0`` the problem is solved with
    ``(mu, f) -> (-mu, -f)`` and the outputs are negated.
    """
    work, flipped = _checked(data, require_hypotheses, report, need_multiplicity=True)
    rho = _staged("rho", default_rho, work) if rho is None else float(rho)
    r_min = _staged("minimize_local", minimize_local, work, rho, tol=tol)
    v0 = _staged("find_v0", find_v0, work, rho)
    r_mp = _staged(
        "mountain_pass",
        mountain_pass,
        work,
        v0,
        n_path=n_path,
        tol=tol,
        path_tol=path_tol,
        max_sweeps=max_sweeps,
    )
    if not r_min.energy <= 0 < r_mp.energy:
        raise ConvergenceError(
            f"energy ordering violated: I(v_min)={r_min.energy:.6g}, I(v_mp)={r_mp.energy:.6g}",
            "mountain_pass",
        )
    for res in (r_min, r_mp):
        _staged("certificate", certify, res, work.mu)
    u1, u2 = r_min.u, r_mp.u
    sep = float(np.max(np.abs(u1 - u2)) / max(1.0, np.max(np.abs(u1))))
    if sep <= DISTINCT_TOL:
        raise ConvergenceError(f"solutions coincide (relative separation {sep:.3e})", "distinct")
    for res in (r_min, r_mp):
        res.extra["separation"] = sep
        res.extra["rho"] = rho
        res.extra["v0_scale"] = float(np.max(v0))
        res.extra["v0"] = v0
        _flip(res, flipped)
    return r_min, r_mp
