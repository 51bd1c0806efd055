"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, parameter, or run configuration."""


class ZeroFieldError(ValueError):
    """An operation that requires a nonzero field received (numerically) zero."""


class InfeasibleDilationError(ValueError):
    """No dilation can bring the field onto the prescribed action shell (T < 2S)."""


class BranchError(RuntimeError):
    """A branch sweep hit a non-converged or out-of-domain point."""


class BlowUpError(RuntimeError):
    """Time propagation produced non-finite values."""
