import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad

from natgrowth import nonlinearity as nl
from natgrowth.exceptions import DomainViolation
from natgrowth.grid import Grid
from natgrowth.problem import ProblemData

finite = dict(allow_nan=False, allow_infinity=False)
mus = st.sampled_from([0.25, 0.5, 1.0, 2.0, 3.0])


def test_hand_values():
    assert nl.g(0.0, 1.0) == 0.0
    # (1+1) ln 2 - 1
    assert nl.g(1.0, 1.0) == pytest.approx(2 * np.log(2) - 1, rel=1e-15)
    assert nl.g(-2.0, 1.0) == 2.0
    assert nl.g(-1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert nl.g_prime(np.e - 1, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert nl.g_prime(-3.0, 1.0) == -1.0
    assert nl.g_prime(-1.0, 1.0) == -nl.DERIVATIVE_CAP
    assert nl.G(0.0, 2.0) == 0.0
    assert nl.H_floor(1.0) == pytest.approx(-0.25, abs=1e-10)


def test_g_continuous_at_kink():
    for mu in (0.5, 1.0, 2.0):
        k = -1.0 / mu
        assert nl.g(k + 1e-12, mu) == pytest.approx(nl.g(k - 1e-12, mu), abs=1e-9)
        assert nl.G(k + 1e-12, mu) == pytest.approx(nl.G(k - 1e-12, mu), abs=1e-9)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_G_matches_quadrature(mu):
    kink = -1.0 / mu
    for s in np.linspace(-5, 5, 41):
        pts = [kink] if min(0.0, s) < kink < max(0.0, s) else None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda t: nl.g(t, mu), 0.0, s, points=pts, epsabs=1e-14, epsrel=1e-14, limit=200)
        assert abs(val - nl.G(s, mu)) <= 1e-10


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_H_plateau(mu):
    s = -1.0 / mu - np.array([0.0, 1e-3, 0.7, 10.0, 1e4])
    np.testing.assert_allclose(nl.H(s, mu), -nl.G(-1.0 / mu, mu) - 0.5 / mu**2, rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(s=st.floats(-1e6, 1e6, **finite), mu=mus)
def test_g_nonnegative(s, mu):
    val = nl.g(s, mu)
    assert val >= 0.0
    if s != 0 and abs(mu * s) > 1e-150:
        assert val > 0.0 or abs(mu * s) < 1e-150


@settings(max_examples=200, deadline=None)
@given(s=st.floats(-1e3, 1e3, **finite), t=st.floats(0.0, 1e3, **finite), mu=mus)
def test_scaling_inequality(s, t, mu):
    s = abs(s)
    lo, hi = sorted((s, t))
    if hi == 0:
        return
    lhs, rhs = nl.H(lo, mu), lo / hi * nl.H(hi, mu)
    assert lhs <= rhs + 1e-12 * (1 + abs(rhs))


@settings(max_examples=100, deadline=None)
@given(s=st.floats(-0.95, 20.0, **finite))
def test_derivative_consistency(s):
    mu = 1.0
    errs = []
    for e in (1e-2, 1e-3):
        dg = (nl.g(s + e, mu) - nl.g(s - e, mu)) / (2 * e)
        errs.append(abs(dg - nl.g_prime(s, mu)))
    # O(eps^2) with a curvature-dependent constant, away from the kink
    bound = 1e-4 / (1 + s) ** 2 + 1e-9
    assert errs[1] <= bound


def test_small_s_uses_series_accurately():
    s = np.array([1e-12, 1e-8, 1e-4, 9e-3])
    ref = s**2 / 2 - s**3 / 6 + s**4 / 12 - s**5 / 20
    np.testing.assert_allclose(nl.g(s, 1.0), ref, rtol=1e-8)


def test_transform_examples():
    assert nl.v_to_u(np.e - 1, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert nl.u_to_v(1.0, 1.0) == pytest.approx(np.e - 1, rel=1e-15)
    np.testing.assert_array_equal(nl.v_to_u(np.zeros(3), 2.0), 0.0)


@settings(max_examples=100, deadline=None)
@given(u=st.lists(st.floats(-15, 15, **finite), min_size=1, max_size=8), mu=mus)
def test_u_to_v_stays_above_kink(u, mu):
    # for mu u below about -36, exp(mu u) - 1 rounds to -1 in double precision
    v = nl.u_to_v(np.array(u) / mu, mu)
    assert np.all(v > -1.0 / mu)


@settings(max_examples=100, deadline=None)
@given(x=st.lists(st.floats(-0.999999, 1e6, **finite), min_size=1, max_size=8), mu=mus)
def test_round_trip(x, mu):
    v = np.array(x) / mu
    back = nl.u_to_v(nl.v_to_u(v, mu), mu)
    np.testing.assert_allclose(back, v, rtol=1e-12, atol=1e-300)


def test_transform_errors():
    with pytest.raises(DomainViolation):
        nl.v_to_u(np.array([0.0, -1.0]), 1.0)
    with pytest.raises(OverflowError):
        nl.u_to_v(1e4, 1.0)
    with pytest.raises(ValueError):
        nl.g(1.0, 0.0)
    with pytest.raises(ValueError):
        nl.g(1.0, -1.0)


def test_sign_normalize():
    grid = Grid.box((4,))
    f0 = np.arange(4.0)
    data = ProblemData.model(grid, 1.0, f0, -1.0)
    flipped, flag = nl.sign_normalize(data)
    assert flag and flipped.mu == 1.0
    np.testing.assert_array_equal(flipped.f, -f0)
    same, flag2 = nl.sign_normalize(flipped)
    assert not flag2 and same is flipped
    with pytest.raises(ValueError):
        nl.sign_normalize(data.replace(mu=0.0))
    with pytest.raises(ValueError):
        nl.sign_normalize(data.replace(mu=np.array([1.0, -1.0, 1.0, 1.0]), mu_bounds=(-1.0, 1.0)))
