class DsmError(Exception):
    """Base class for errors raised by dsmopt."""


class ValidationError(DsmError, ValueError):
    """Invalid input data or configuration."""


class SolverError(DsmError, RuntimeError):
    """An optimization could not be solved to optimality."""
