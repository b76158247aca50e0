"""Semantic exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ValidationError (and subclasses) -> 2,
NumericalError -> 3. Anything else is a bug.
"""


class XtremesError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(XtremesError, ValueError):
    """Inputs violate a documented contract (shape, domain, format)."""


class FormatError(ValidationError):
    """A container file is malformed; carries the offending byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class NonFiniteError(ValidationError):
    """A payload holds NaN/Inf; carries the first offending flat index."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (flat index {index})")
        self.index = index


class ConfigError(ValidationError):
    """A configuration object is inconsistent or out of range."""


class NumericalError(XtremesError, ArithmeticError):
    """A numerical procedure failed (factorization, divergence)."""
