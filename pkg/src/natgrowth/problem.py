"""The coefficient bundle defining one problem instance."""

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, MatrixField
from .validation import check_field, check_same_grid


@dataclass(frozen=True, eq=False)
class ProblemData:
    """Coefficients of ``-div(A grad u) = c0 u + mu <A grad u, grad u> + f``.

    ``mu`` is a float (model problem) or a nodal array (exploratory
    variable-coupling mode, only meaningful for the bracketed solver).
    """

    grid: Grid
    A: MatrixField
    c0: np.ndarray
    f: np.ndarray
    mu: object = 1.0
    p: float = 2.0
    mu_bounds: tuple = field(default=None)

    def __post_init__(self):
        check_same_grid(self.grid, self.A.grid)
        object.__setattr__(self, "c0", check_field(self.grid, self.c0, "c0", allow_scalar=True))
        object.__setattr__(self, "f", check_field(self.grid, self.f, "f", allow_scalar=True))
        if np.ndim(self.mu) == 0:
            object.__setattr__(self, "mu", float(self.mu))
        else:
            mu = check_field(self.grid, self.mu, "mu")
            object.__setattr__(self, "mu", mu)
            if self.mu_bounds is None:
                object.__setattr__(self, "mu_bounds", (float(mu.min()), float(mu.max())))
            lo, hi = self.mu_bounds
            if mu.min() < lo - 1e-14 or mu.max() > hi + 1e-14:
                raise ValueError(f"mu(x) leaves its declared bounds [{lo}, {hi}]")
        if not np.isfinite(self.mu).all():
            raise ValueError("mu must be finite")
        p_min = self.grid.ndim / 2 if self.grid.ndim == 3 else 1.5
        strict = self.grid.ndim == 3
        if (strict and self.p <= p_min) or (not strict and self.p < p_min):
            raise ValueError(f"exponent p={self.p} too small for N={self.grid.ndim}")

    @classmethod
    def model(cls, grid, c0=0.0, f=0.0, mu=1.0, p=2.0, A=None):
        """Instance with ``A = I`` unless given."""
        return cls(grid, MatrixField.identity(grid) if A is None else A, c0, f, mu, p)

    @property
    def variable_mu(self):
        return np.ndim(self.mu) > 0

    @property
    def mu_max(self):
        return float(np.max(np.abs(self.mu)))

    @property
    def multiplicity_mode(self):
        """``c0 >= 0`` everywhere and not identically zero."""
        return bool(np.all(self.c0 >= 0) and np.any(self.c0 > 0))

    def replace(self, **changes):
        import dataclasses

        return dataclasses.replace(self, **changes)
