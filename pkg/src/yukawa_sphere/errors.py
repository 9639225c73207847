"""Exception types shared across the solver."""


class YukawaSphereError(Exception):
    """Base class for all library errors."""


class DomainError(YukawaSphereError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(YukawaSphereError, ValueError):
    """Evaluation requested at (or too close to) a kernel singularity."""


class ConvergenceError(YukawaSphereError, RuntimeError):
    """A series did not converge within the term budget.

    Carries the magnitude of the last computed term in ``last_term``.
    """

    def __init__(self, message, last_term=None):
        super().__init__(message)
        self.last_term = last_term


class GeometryError(YukawaSphereError, ValueError):
    """Invalid curve or boundary configuration."""


class QuadratureError(YukawaSphereError, ValueError):
    """Quadrature rule cannot be applied with the given parameters."""


class SolverError(YukawaSphereError, RuntimeError):
    """Iterative solve failed; ``residual_history`` holds the recorded residuals."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])


class AccuracyError(YukawaSphereError, ValueError):
    """Requested evaluation cannot meet its accuracy contract (e.g. target too close to the boundary)."""


class DiagnosticError(YukawaSphereError, RuntimeError):
    """Dense eigenvalue / singular value computation failed to converge."""


class ConfigError(YukawaSphereError, ValueError):
    """Invalid experiment configuration."""
