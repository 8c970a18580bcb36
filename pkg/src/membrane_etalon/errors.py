"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical or numerical domain of an operation."""


class DivergenceError(DomainError):
    """Round-trip gain at or above unity, the loop sum does not converge."""


class ConvergenceError(RuntimeError):
    """An iterative routine stopped without reaching its tolerance."""


class ParseError(ValueError):
    """Malformed config or data file; message carries the location."""


class ModelValidityWarning(UserWarning):
    """Parameters outside the regime where the model is trustworthy."""
