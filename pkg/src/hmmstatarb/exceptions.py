class StatArbError(Exception):
    """Base class for all package errors."""


class DataError(StatArbError, ValueError):
    """Malformed or misaligned input data."""


class EstimationError(StatArbError, ArithmeticError):
    """A numerical procedure could not produce an estimate (singular design, underflow, ...)."""


class NoCointegrationError(StatArbError):
    """The trace test did not reject a cointegration rank of zero."""

    def __init__(self, result=None, message="no cointegrating relation at the 5% level"):
        super().__init__(message)
        self.result = result
