"""Exception types shared across the package."""


class ModelSyntaxError(ValueError):
    """A malformed line in a .tra/.lab/certificate file."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """Input is well-formed but violates a model invariant."""


class DimensionError(ValueError):
    """A vector does not have the length its role requires."""


class ModeMismatch(ValueError):
    """An option is not defined for the requested min/max mode."""


class KindMismatch(ValueError):
    """A certificate of the wrong kind was passed."""


class SolverError(RuntimeError):
    """The LP/MILP backend gave up (iteration or node limit)."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class Unsatisfied(Exception):
    """The threshold property does not hold, so no certificate exists."""

    def __init__(self, message="Property is not satisfied!"):
        super().__init__(message)
