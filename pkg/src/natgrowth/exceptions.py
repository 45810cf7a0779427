"""Exception hierarchy.

Each failure class maps to one CLI exit code (see :mod:`natgrowth.cli`).
"""


class NatGrowthError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    stage = None

    def __init__(self, message, stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class GridMismatchError(NatGrowthError, ValueError):
    """Fields or coefficients live on different grids."""


class ConfigError(NatGrowthError, ValueError):
    exit_code = 2


class HypothesisFailure(NatGrowthError):
    """A structural hypothesis required by the requested pipeline does not hold."""

    exit_code = 3


class GeometryNotFound(NatGrowthError):
    """No point ``v0`` with ``I(v0) <= 0`` beyond the ball could be found."""

    exit_code = 4


class ConvergenceError(NatGrowthError):
    """An iterative solver stopped without meeting its tolerance."""

    exit_code = 5


class PathCollapseError(ConvergenceError):
    """The maximum of the mountain-pass path moved to an endpoint."""


class CertificateError(NatGrowthError):
    """The lower bound ``v > -1/(2 mu)`` failed, so ``v`` cannot be mapped back to ``u``."""

    exit_code = 6


class DomainViolation(CertificateError, ValueError):
    """A nodal value ``v <= -1/mu`` was passed to the logarithmic map."""
