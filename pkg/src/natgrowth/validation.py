"""Input validation helpers shared by the solvers and estimators."""

import numbers

import numpy as np

from .exceptions import GridMismatchError


def check_field(grid, v, name="field", allow_scalar=False):
    """Return ``v`` as a float64 array shaped like ``grid``.

    Scalars are broadcast when ``allow_scalar`` is true. Flat vectors of the
    right length are reshaped (row-major).
    """
    if allow_scalar and isinstance(v, numbers.Real):
        return np.full(grid.shape, float(v))
    arr = np.asarray(v, dtype=float)
    if arr.shape != grid.shape:
        if arr.ndim == 1 and arr.size == grid.size:
            arr = arr.reshape(grid.shape)
        else:
            raise GridMismatchError(
                f"{name} has shape {arr.shape}, grid expects {grid.shape}"
            )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_grid(*grids):
    first = grids[0]
    for other in grids[1:]:
        if other != first:
            raise GridMismatchError(f"grid mismatch: {first} vs {other}")
    return first


def check_mu(mu):
    """Validate a positive coupling (scalar or nodal array)."""
    arr = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("mu must be positive (normalize the sign first)")
    return mu if arr.ndim == 0 and isinstance(mu, numbers.Real) else arr
