"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Raised when input data or derived state violates a documented contract."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""
