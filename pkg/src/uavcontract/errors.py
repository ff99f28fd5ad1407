"""Exception types shared across the package."""


class UavContractError(Exception):
    """Base class for all package-specific errors."""


class SpeedViolation(UavContractError):
    """A mobility command asks for more displacement than one slot allows."""


class ZeroCapacity(UavContractError):
    """Channel capacity underflowed to zero; the UAV is unreachable."""


class TooManyTypes(UavContractError):
    """The brute-force oracle refuses more than three eligible types."""


class InsufficientData(UavContractError):
    """A trailing-window statistic was requested on a log shorter than the window."""


class ParseError(UavContractError):
    """Config file is not syntactically valid; carries line/column when known."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(UavContractError):
    """Config parsed but violates an invariant; names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NotConverged(UavContractError):
    """A learning run ended without meeting the convergence criterion."""
