"""Exception types shared across the package."""


class SquidHarmError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SquidHarmError):
    """Invalid configuration or input file schema."""


class CutoffError(SquidHarmError):
    """Charge-basis cutoff too small for the requested potential."""


class NonHermitianError(SquidHarmError):
    """A matrix that must be self-adjoint is not."""


class SolverError(SquidHarmError):
    """Eigensolver failure (other than running out of iterations)."""


class ConvergenceError(SquidHarmError):
    """An iterative procedure did not converge; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnidentifiableDataError(SquidHarmError):
    """Dataset cannot constrain the requested parameters."""


class AmbiguousStateError(SquidHarmError):
    """Dressed-state assignment has no clear winner."""


class QuadratureError(SquidHarmError):
    """Numerical integration failed to reach the requested tolerance."""
