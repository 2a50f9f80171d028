"""Exception hierarchy shared across the package."""


class EranetError(Exception):
    """Base class for all errors raised by eranet."""


class OutOfRangeError(EranetError, ValueError):
    """A year falls after the last era of the scheme."""


class SchemeError(EranetError, ValueError):
    """An era scheme violates its ordering invariants."""


class ParseError(EranetError):
    """An input file cannot be read or lacks its header."""


class FetchError(EranetError):
    """A remote SPARQL endpoint could not be queried."""


class PreconditionError(EranetError, ValueError):
    """An operation was called on a network in the wrong state."""


class InvalidSliceError(EranetError, ValueError):
    """A slice kind is malformed, e.g. an inter-era slice with source >= target."""


class NonConvergenceError(EranetError, RuntimeError):
    """Era repair exceeded its iteration bound."""


class UndefinedInputError(EranetError, ValueError):
    """A measure is undefined for the given input (e.g. Jaccard of two empty sets)."""


class ConfigError(EranetError, ValueError):
    """A pipeline config file is malformed."""


class DataValidationError(EranetError):
    """Input data violates a network invariant."""

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


class InvariantError(EranetError, AssertionError):
    """An internal consistency check failed after a pipeline stage."""
