import numpy as np
import pytest

from natgrowth import nonlinearity as nl
from natgrowth.energy import energy_gradient, energy_value, find_v0, residual_norm
from natgrowth.exceptions import CertificateError, ConvergenceError, HypothesisFailure
from natgrowth.grid import Grid, h1_norm
from natgrowth.problem import ProblemData
from natgrowth.solvers.descent import minimize_local
from natgrowth.solvers.mountain_pass import initial_path, mountain_pass, respace, segment_lengths
from natgrowth.solvers.newton import newton_transformed
from natgrowth.solvers.pipeline import certify, default_rho, solve_model_both, solve_model_min
from natgrowth.solvers.linear import solve_linear

# regression values of the shipped fixture (first pilot run)
E_MIN = -6.533651278263184e-05
E_MP = 1.4947520718060882e29
SEPARATION = 35.40050443090492
V0_SCALE = 2.0**52
RHO = 0.04518504292744987


def small_problem(n=15, amp=1.0):
    grid = Grid.box((n, n))
    c0 = grid.sample(lambda x, y: amp * np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / (2 * 0.2**2)))
    f = grid.sample(lambda x, y: 0.1 * np.sin(np.pi * x) * np.sin(np.pi * y))
    return ProblemData.model(grid, c0, f, 1.0)


def test_default_rho(fixture_problem):
    assert default_rho(fixture_problem) == pytest.approx(RHO, rel=1e-10)
    assert default_rho(fixture_problem.replace(f=np.zeros(fixture_problem.grid.shape))) == 1e-2


def test_minimize_local(fixture_problem):
    res = minimize_local(fixture_problem, RHO)
    assert res.converged and res.residual_norm <= 1e-9
    assert res.energy < 0
    assert res.extra["norm"] < RHO
    energies = [h["energy"] for h in res.history]
    assert np.all(np.diff(energies) <= 1e-15)


def test_minimize_local_rejects_small_ball(fixture_problem):
    with pytest.raises(ConvergenceError):
        minimize_local(fixture_problem, 1e-4)


def test_newton_quadratic_convergence(fixture_problem):
    res = newton_transformed(fixture_problem, fixture_problem.grid.zeros(), tol=1e-15)
    r = np.array([h["residual"] for h in res.history])
    # stop at the first iterate on the round-off floor
    r = r[: int(np.argmax(r < 1e-13)) + 1]
    assert len(r) >= 3 and r[-1] < 1e-13
    tail = r[-3:]
    assert np.all(tail[1:] <= 1.0 * tail[:-1] ** 2)


def test_respace_uniform_and_pinned():
    data = small_problem()
    v0 = find_v0(data, 0.05)
    path = initial_path(data, v0, 11)
    # bunch the nodes, then respace
    t = np.linspace(0, 1, 11) ** 3
    path.nodes = [s * v0 for s in t]
    path.energies = np.array([energy_value(v, data) for v in path.nodes])
    even = respace(data, path)
    seg = segment_lengths(data, even)
    assert np.ptp(seg) <= 1e-8 * seg.mean()
    pinned = respace(data, path, pin=5)
    # the pinned node survives verbatim, possibly under a new index
    assert sum(np.array_equal(v, path.nodes[5]) for v in pinned.nodes) == 1
    assert np.array_equal(pinned.nodes[0], path.nodes[0]) and np.array_equal(pinned.nodes[-1], v0)


def test_mountain_pass_monotone_max(fixture_solutions):
    _, mp = fixture_solutions
    peaks = np.array([h["energy"] for h in mp.history])
    assert np.all(np.diff(peaks) <= 1e-12 * np.maximum(1.0, np.abs(peaks[:-1])))
    cer = np.array([h["cerami"] for h in mp.history])
    assert np.all(np.isfinite(cer))
    assert mp.extra["cerami_final"] <= 1e-9 * (1 + mp.extra["norm"])


def test_mountain_pass_rejects_positive_endpoint():
    data = small_problem()
    phi = find_v0(data, 0.05) / 2.0**40
    assert energy_value(phi, data) > 0
    with pytest.raises(ValueError):
        mountain_pass(data, phi)


def test_fixture_regression(fixture_solutions):
    m, s = fixture_solutions
    assert m.energy == pytest.approx(E_MIN, rel=1e-8)
    assert s.energy == pytest.approx(E_MP, rel=1e-6)
    assert m.extra["separation"] == pytest.approx(SEPARATION, rel=1e-6)
    assert s.extra["v0_scale"] == V0_SCALE
    assert s.extra["rho"] == pytest.approx(RHO, rel=1e-10)


def test_energy_ordering_and_certificate(fixture_solutions):
    m, s = fixture_solutions
    assert m.energy < 0 < s.energy
    for r in (m, s):
        assert r.lower_bound_ok and r.v.min() > -0.5
        np.testing.assert_allclose(r.u, nl.v_to_u(r.v, 1.0))


def test_certificate_failure():
    from natgrowth.solvers.result import SolveResult

    res = SolveResult(kind="x", v=np.array([-0.6, 0.0]), min_v=-0.6)
    with pytest.raises(CertificateError):
        certify(res, 1.0)


def test_solve_min_refuses_failed_hypotheses():
    grid = Grid.box((15, 15))
    data = ProblemData.model(grid, 0.0, 1.0, 150.0)
    with pytest.raises(HypothesisFailure):
        solve_model_min(data)


def test_solve_both_needs_multiplicity_mode():
    grid = Grid.box((9, 9))
    data = ProblemData.model(grid, -1.0, 0.1, 1.0)
    with pytest.raises(HypothesisFailure):
        solve_model_both(data)


def test_coercive_case_unique_solution():
    # c0 <= 0: the minimizer equals the v-linear problem's solution when c0 = 0
    data = small_problem(amp=0.0)
    res = solve_model_min(data)
    lin = solve_linear(data.mu * data.f, data.f, data)
    assert np.max(np.abs(res.v - lin.v)) <= 1e-8


def test_mirror_is_exact_negation(fixture_solutions, mirror_problem):
    m2, s2 = solve_model_both(mirror_problem)
    m1, s1 = fixture_solutions
    assert np.array_equal(m2.u, -m1.u) and np.array_equal(s2.u, -s1.u)
    assert m2.extra["flipped"] and not m1.extra["flipped"]


def test_positive_source_gives_nonnegative_solutions():
    grid = Grid.box((33, 33))
    c0 = grid.sample(lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / (2 * 0.2**2)))
    f = grid.sample(lambda x, y: 0.2 * np.exp(-((x - 0.35) ** 2 + (y - 0.6) ** 2) / (2 * 0.1**2)))
    m, s = solve_model_both(ProblemData.model(grid, c0, f, 1.0))
    assert m.v.min() >= 0 and s.v.min() >= 0


def test_separation_is_relative_sup_distance(fixture_solutions):
    m, s = fixture_solutions
    sep = np.max(np.abs(m.u - s.u)) / max(1.0, np.max(np.abs(m.u)))
    assert m.extra["separation"] == pytest.approx(sep, rel=1e-14)
    assert sep >= 1e-4


def test_residuals_recomputed(fixture_problem, fixture_solutions):
    for r in fixture_solutions:
        rn = residual_norm(energy_gradient(r.v, fixture_problem), r.v, fixture_problem.grid)
        assert rn == pytest.approx(r.residual_norm, rel=1e-8) and rn <= 1e-8
        assert h1_norm(fixture_problem.A, r.v) > 0
