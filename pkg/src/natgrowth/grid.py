"""Tensor-product box grids with homogeneous Dirichlet boundary.

Fields are plain ``numpy`` arrays shaped like ``grid.shape`` holding values at
interior nodes; boundary values are implicitly zero. The discrete operator is
assembled once per :class:`MatrixField` as a sparse matrix in the form
``sum_k D_k^T diag(a_k) D_k`` (face differences, diagonal part) plus centered
cross terms, so the operator is symmetric and the energy identity
``<L v, v> = h1_seminorm_sq(A, v)`` holds by construction.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

import numpy as np
import scipy.sparse as sp

from .exceptions import GridMismatchError
from .validation import check_field


@dataclass(frozen=True)
class Grid:
    """Interior nodes of the box ``prod_k (0, L_k)``, with ``L_k = (n_k + 1) h_k``."""

    n: tuple
    h: tuple

    def __post_init__(self):
        n = tuple(int(k) for k in np.atleast_1d(self.n))
        h = tuple(float(x) for x in np.atleast_1d(self.h))
        if len(h) == 1 and len(n) > 1:
            h = h * len(n)
        if not 1 <= len(n) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(n)}")
        if len(h) != len(n):
            raise ValueError("n and h must have the same length")
        if any(k < 2 for k in n):
            raise ValueError(f"each interior count must be >= 2, got {n}")
        if any(not np.isfinite(x) or x <= 0 for x in h):
            raise ValueError(f"spacings must be positive, got {h}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)

    @classmethod
    def box(cls, n, lengths=1.0):
        """Grid with ``n`` interior nodes per axis on a box of the given side lengths."""
        n = tuple(int(k) for k in np.atleast_1d(n))
        lengths = np.broadcast_to(np.asarray(lengths, dtype=float), (len(n),))
        return cls(n, tuple(float(L) / (k + 1) for L, k in zip(lengths, n)))

    @property
    def ndim(self):
        return len(self.n)

    @property
    def shape(self):
        return self.n

    @property
    def size(self):
        return int(np.prod(self.n))

    @property
    def lengths(self):
        return tuple((k + 1) * h for k, h in zip(self.n, self.h))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    def coordinates(self, axis):
        """Coordinates of the interior nodes along ``axis``."""
        return self.h[axis] * np.arange(1, self.n[axis] + 1)

    def mesh(self):
        return np.meshgrid(*(self.coordinates(k) for k in range(self.ndim)), indexing="ij")

    def sample(self, func):
        """Evaluate ``func(x_1, ..., x_N)`` at the interior nodes."""
        return np.broadcast_to(np.asarray(func(*self.mesh()), dtype=float), self.shape).copy()

    def zeros(self):
        return np.zeros(self.shape)

    def multi_index(self, flat):
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def flat_index(self, index):
        return int(np.ravel_multi_index(index, self.shape))

    def refine(self):
        """Halve every spacing on the same box (``n -> 2n + 1``)."""
        return Grid(tuple(2 * k + 1 for k in self.n), tuple(h / 2 for h in self.h))


def _kron_axis(grid, axis, op1d):
    mats = [sp.identity(k, format="csr") for k in grid.n]
    mats[axis] = sp.csr_matrix(op1d)
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


@lru_cache(maxsize=64)
def face_difference(grid, axis):
    """Sparse map from nodes to the ``n_axis + 1`` faces along ``axis``: ``(v_f - v_{f-1}) / h``.

    The face space is itself row-major with ``n_axis + 1`` entries on ``axis``.
    """
    n = grid.n[axis]
    d = sp.diags([np.ones(n), -np.ones(n)], [0, -1], shape=(n + 1, n))
    mats = [sp.identity(k, format="csr") for k in grid.n]
    mats[axis] = sp.csr_matrix(d / grid.h[axis])
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


@lru_cache(maxsize=64)
def centered_difference(grid, axis):
    """Sparse centered first difference with zero ghost values (skew-symmetric)."""
    n = grid.n[axis]
    d = sp.diags([np.ones(n - 1), -np.ones(n - 1)], [1, -1], shape=(n, n))
    return _kron_axis(grid, axis, d / (2.0 * grid.h[axis]))


def face_average(values, axis):
    """Average nodal ``values`` onto faces along ``axis``; boundary faces copy the adjacent node."""
    pad = [(0, 0)] * values.ndim
    pad[axis] = (1, 1)
    ext = np.pad(values, pad, mode="edge")
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (ext[tuple(lo)] + ext[tuple(hi)])


class MatrixField:
    """Symmetric coefficient matrix ``A(x)`` at every interior node.

    Parameters
    ----------
    grid : Grid
    values : array_like, shape ``grid.shape + (N, N)``
    lower, upper : float, optional
        Declared ellipticity bounds. When omitted they are taken from the
        extreme nodal eigenvalues; when given, every nodal eigenvalue must lie
        in ``[lower, upper]``.
    """

    def __init__(self, grid, values, lower=None, upper=None):
        N = grid.ndim
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape + (N, N):
            raise GridMismatchError(
                f"matrix field has shape {values.shape}, expected {grid.shape + (N, N)}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix field contains non-finite values")
        if not np.allclose(values, np.swapaxes(values, -1, -2), rtol=0, atol=1e-14):
            raise ValueError("matrix field must be symmetric at every node")
        eig = np.linalg.eigvalsh(values)
        lo, hi = float(eig.min()), float(eig.max())
        lower = lo if lower is None else float(lower)
        upper = hi if upper is None else float(upper)
        if not 0 < lower <= upper:
            raise ValueError(f"need 0 < lower <= upper, got {lower}, {upper}")
        tol = 1e-12 * max(1.0, abs(upper))
        if lo < lower - tol or hi > upper + tol:
            raise ValueError(
                f"nodal eigenvalues span [{lo}, {hi}], outside declared [{lower}, {upper}]"
            )
        self.grid = grid
        self.values = values
        self.lower = lower
        self.upper = upper

    @classmethod
    def identity(cls, grid):
        return cls(grid, np.broadcast_to(np.eye(grid.ndim), grid.shape + (grid.ndim,) * 2))

    @classmethod
    def diagonal(cls, grid, diag, lower=None, upper=None):
        """Diagonal field from a sequence of ``N`` nodal arrays (or scalars)."""
        N = grid.ndim
        vals = np.zeros(grid.shape + (N, N))
        for k, d in enumerate(diag):
            vals[..., k, k] = check_field(grid, d, f"A[{k}{k}]", allow_scalar=True)
        return cls(grid, vals, lower, upper)

    @cached_property
    def is_diagonal(self):
        off = self.values.copy()
        idx = np.arange(self.grid.ndim)
        off[..., idx, idx] = 0.0
        return not np.any(off)

    def face_coefficients(self, axis):
        return face_average(self.values[..., axis, axis], axis)

    @cached_property
    def stiffness(self):
        """Sparse nodal operator ``L`` with ``(L v)_i ~ -div(A grad v)(x_i)``."""
        g = self.grid
        L = sp.csr_matrix((g.size, g.size))
        for k in range(g.ndim):
            D = face_difference(g, k)
            L = L + D.T @ sp.diags(self.face_coefficients(k).ravel()) @ D
        if not self.is_diagonal:
            C = [centered_difference(g, k) for k in range(g.ndim)]
            for i in range(g.ndim):
                for j in range(g.ndim):
                    if i != j:
                        L = L + C[i].T @ sp.diags(self.values[..., i, j].ravel()) @ C[j]
        L = sp.csr_matrix(L)
        L.sum_duplicates()
        return L

    @cached_property
    def stiffness_lu(self):
        """Sparse LU factorization of :attr:`stiffness` (used for Sobolev gradients)."""
        import scipy.sparse.linalg as spla

        return spla.splu(sp.csc_matrix(self.stiffness))


def apply_operator(A, v):
    """Second-order discretization of ``-div(A grad v)`` with zero Dirichlet data."""
    v = check_field(A.grid, v, "v")
    return (A.stiffness @ v.ravel()).reshape(A.grid.shape)


def gradient_sq(A, v):
    """Nodal ``<A grad v, grad v>`` from centered differences (ghost boundary values 0)."""
    v = check_field(A.grid, v, "v")
    g = A.grid
    grads = [(centered_difference(g, k) @ v.ravel()).reshape(g.shape) for k in range(g.ndim)]
    out = np.zeros(g.shape)
    for i in range(g.ndim):
        for j in range(g.ndim):
            aij = A.values[..., i, j]
            if np.any(aij):
                out += aij * grads[i] * grads[j]
    return out


def integrate(grid, v):
    """Node-centered quadrature ``sum_i v_i * prod_k h_k``."""
    v = check_field(grid, v, "v", allow_scalar=True)
    return float(np.sum(v)) * grid.cell_volume


def inner(grid, a, b):
    """Quadrature pairing ``<a, b>``."""
    return float(np.dot(np.ravel(a), np.ravel(b))) * grid.cell_volume


def lp_norm(grid, v, p):
    if p < 1:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    v = check_field(grid, v, "v", allow_scalar=True)
    if np.isinf(p):
        return float(np.max(np.abs(v)))
    return integrate(grid, np.abs(v) ** p) ** (1.0 / p)


def h1_seminorm_sq(A, v):
    """Face-based energy ``int <A grad v, grad v>`` (equals ``<L v, v>`` under quadrature)."""
    v = check_field(A.grid, v, "v")
    g = A.grid
    total = 0.0
    for k in range(g.ndim):
        dv = face_difference(g, k) @ v.ravel()
        total += float(np.dot(A.face_coefficients(k).ravel(), dv * dv))
    if not A.is_diagonal:
        grads = [centered_difference(g, k) @ v.ravel() for k in range(g.ndim)]
        for i in range(g.ndim):
            for j in range(g.ndim):
                if i != j:
                    total += float(np.dot(A.values[..., i, j].ravel(), grads[i] * grads[j]))
    return total * g.cell_volume


def h1_norm(A, v):
    return float(np.sqrt(max(h1_seminorm_sq(A, v), 0.0)))
