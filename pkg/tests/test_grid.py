import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from natgrowth.exceptions import GridMismatchError
from natgrowth.grid import (
    Grid,
    MatrixField,
    apply_operator,
    gradient_sq,
    h1_norm,
    h1_seminorm_sq,
    inner,
    integrate,
    lp_norm,
)


def dense_laplacian_1d(n, h):
    return (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2


def test_apply_operator_hand_values(grid1d, spike):
    A = MatrixField.identity(grid1d)
    np.testing.assert_allclose(apply_operator(A, spike), [-16.0, 32.0, -16.0], rtol=0, atol=1e-12)


def test_stiffness_matches_dense_assembly():
    for n, h in [(3, 0.25), (7, 0.125), (10, 0.3)]:
        g = Grid((n,), (h,))
        L = MatrixField.identity(g).stiffness.toarray()
        np.testing.assert_allclose(L, dense_laplacian_1d(n, h), rtol=1e-13, atol=1e-12)


def test_stiffness_2d_is_kronecker_sum():
    g = Grid((4, 5), (0.2, 1 / 6))
    L = MatrixField.identity(g).stiffness.toarray()
    L1, L2 = dense_laplacian_1d(4, 0.2), dense_laplacian_1d(5, 1 / 6)
    ref = np.kron(L1, np.eye(5)) + np.kron(np.eye(4), L2)
    np.testing.assert_allclose(L, ref, rtol=1e-13, atol=1e-10)


def test_gradient_sq_hand_values(grid1d, spike):
    A = MatrixField.identity(grid1d)
    np.testing.assert_allclose(gradient_sq(A, spike), [4.0, 0.0, 4.0], atol=1e-12)


def test_gradient_sq_exact_for_linear_interior_nodes():
    g = Grid.box((9,))
    A = MatrixField.identity(g)
    x = g.coordinates(0)
    gs = gradient_sq(A, x)
    # interior nodes away from the ghost boundary see the exact slope
    np.testing.assert_allclose(gs[1:-1], 1.0, rtol=1e-12)


def test_quadrature_hand_values(grid1d):
    assert integrate(grid1d, np.ones(3)) == pytest.approx(0.75, abs=1e-15)
    g2 = Grid((3, 3), (0.25, 0.25))
    assert integrate(g2, 2.0 * np.ones((3, 3))) == pytest.approx(1.125, abs=1e-15)
    assert lp_norm(grid1d, np.ones(3), 2) == pytest.approx(np.sqrt(0.75), abs=1e-15)


def test_h1_norm_hand_value(grid1d, spike):
    A = MatrixField.identity(grid1d)
    assert h1_seminorm_sq(A, spike) == pytest.approx(8.0, abs=1e-12)
    assert h1_norm(A, spike) == pytest.approx(np.sqrt(8.0), abs=1e-12)


def test_lp_norm_infinity_and_invalid_p(grid1d):
    assert lp_norm(grid1d, np.array([1.0, -3.0, 2.0]), np.inf) == 3.0
    with pytest.raises(ValueError):
        lp_norm(grid1d, np.ones(3), 0.5)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), ndim=st.integers(1, 2))
def test_operator_symmetric_and_summation_by_parts(seed, ndim):
    rng = np.random.default_rng(seed)
    n = tuple(rng.integers(2, 7, size=ndim))
    g = Grid.box(n)
    diag = [1.0 + rng.random(g.shape) for _ in range(ndim)]
    A = MatrixField.diagonal(g, diag)
    v, w = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
    lhs = inner(g, apply_operator(A, v), w)
    rhs = inner(g, v, apply_operator(A, w))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
    assert inner(g, apply_operator(A, v), v) == pytest.approx(h1_seminorm_sq(A, v), rel=1e-12)


def test_nondiagonal_operator_symmetric_positive():
    rng = np.random.default_rng(3)
    g = Grid.box((5, 6))
    vals = np.zeros(g.shape + (2, 2))
    vals[..., 0, 0] = 2.0
    vals[..., 1, 1] = 1.5
    vals[..., 0, 1] = vals[..., 1, 0] = 0.3 * np.sin(g.mesh()[0] * 3)
    A = MatrixField(g, vals)
    L = A.stiffness.toarray()
    np.testing.assert_allclose(L, L.T, atol=1e-10)
    v = rng.standard_normal(g.shape)
    assert inner(g, apply_operator(A, v), v) == pytest.approx(h1_seminorm_sq(A, v), rel=1e-12)


def test_quadratic_exactness_1d():
    # second differences are exact on quadratics vanishing at both ends
    g = Grid.box((11,))
    x = g.coordinates(0)
    u = x * (1 - x)
    np.testing.assert_allclose(apply_operator(MatrixField.identity(g), u), 2.0, rtol=1e-10)


def test_refinement_order_two():
    errs = []
    for n in (15, 31, 63):
        g = Grid.box((n, n))
        X, Y = g.mesh()
        u = np.sin(np.pi * X) * np.sin(np.pi * Y)
        errs.append(np.max(np.abs(apply_operator(MatrixField.identity(g), u) - 2 * np.pi**2 * u)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.9)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid((1,), (0.5,))
    with pytest.raises(ValueError):
        Grid((3, 3, 3, 3), (0.1,))
    with pytest.raises(ValueError):
        Grid((3,), (-0.1,))
    g = Grid.box((3, 4), (1.0, 2.0))
    assert g.shape == (3, 4) and g.h == (0.25, 0.4)
    assert g.refine().n == (7, 9)


def test_matrix_field_errors(grid1d):
    with pytest.raises(GridMismatchError):
        MatrixField(grid1d, np.ones((4, 1, 1)))
    with pytest.raises(ValueError):
        MatrixField(grid1d, -np.ones((3, 1, 1)))
    with pytest.raises(ValueError):
        MatrixField(grid1d, np.ones((3, 1, 1)), lower=2.0)
    g2 = Grid.box((3, 3))
    bad = np.zeros((3, 3, 2, 2))
    bad[..., 0, 1] = 1.0
    bad[..., 0, 0] = bad[..., 1, 1] = 2.0
    with pytest.raises(ValueError):
        MatrixField(g2, bad)
    with pytest.raises(GridMismatchError):
        apply_operator(MatrixField.identity(grid1d), np.ones(4))
