"""Exception types shared across the package."""


class RarefactionError(Exception):
    """Base class for all package errors."""


class HyperbolicityViolated(RarefactionError, ValueError):
    """A curve fails ``1 - phi'(x) > 0`` somewhere."""


class NoConvergence(RarefactionError, RuntimeError):
    """An implicit-function solve hit its iteration cap."""


class QuadratureNotConverged(RarefactionError, RuntimeError):
    """Node doubling did not stabilise a Hopf-Cole quadrature."""


class RegionBoundaryTooClose(RarefactionError, ValueError):
    """A finite-difference stencil straddles a fan boundary."""


class CflViolation(RarefactionError, ValueError):
    """Requested time step exceeds the explicit stability bound."""


class NonFiniteValue(RarefactionError, FloatingPointError):
    """A solver step produced NaN or inf."""


class DegenerateFit(RarefactionError, ValueError):
    """A decay series cannot be fitted in log-log space."""


class ConfigError(RarefactionError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
