"""Exception and warning classes raised across the package."""


class TelabError(Exception):
    """Base class for all errors raised by telab."""


class ParameterError(TelabError, ValueError):
    """An argument is outside its admissible range."""


class CoverageError(ParameterError):
    """A grid does not cover the domain it is asked to sample."""


class DomainError(TelabError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class SingularityError(DomainError):
    """Evaluation at a singular point (e.g. source and target coincide)."""


class PlacementError(ParameterError):
    """A source was placed where it is not allowed (e.g. inside the scatterer)."""


class ShapeError(TelabError, ValueError):
    """Array shapes or quadratures do not match."""


class ResolutionError(TelabError, ValueError):
    """The discretisation is too coarse for the requested operation."""


class SolverError(TelabError, RuntimeError):
    """A linear or eigenvalue solver failed."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(SolverError):
    """An iterative method stagnated."""


class DegenerateMediumError(ParameterError):
    """The medium has no contrast, so the requested quantity is undefined."""


class DegenerateOrderError(SolverError):
    """A separated-variables matching system is singular for one angular order."""

    def __init__(self, message, order):
        super().__init__(message)
        self.order = order


class RecoveryDomainError(DomainError):
    """Eigenfunction recovery needs a contrast bounded away from zero."""


class CutoffError(TelabError, ValueError):
    """An automatic cut-off could not be determined."""


class ConfigError(TelabError, ValueError):
    """A run configuration failed validation."""


class ParseError(TelabError, ValueError):
    """A file could not be parsed."""

    def __init__(self, message, line=None, offset=None):
        if line is not None:
            message = f"{message} (line {line}, offset {offset})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class FormatValidationError(ParseError):
    """A file parsed but its content is inconsistent."""


class ResolutionWarning(UserWarning):
    """Grid spacing is coarser than the recommended k*h <= 0.5."""


class TrivialPairWarning(UserWarning):
    """A residual check was run on an identically zero eigenpair."""


class NotNearEigenvalueWarning(UserWarning):
    """A probe that assumes a transmission eigenvalue was run away from one."""
