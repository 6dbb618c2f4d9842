"""Exception types shared across the package."""

from __future__ import annotations


class QlutError(Exception):
    """Base class for all errors raised by qlut."""


class FormatRangeError(QlutError, ValueError):
    """A value or code does not fit in a fixed-point format."""

    def __init__(self, message: str, low: float | None = None, high: float | None = None):
        super().__init__(message)
        self.low = low
        self.high = high


class TableTooLargeError(QlutError, ValueError):
    """The input register would need more bits than the table-size guard allows."""

    def __init__(self, total_bits: int, limit: int):
        super().__init__(
            f"table too large: input register needs {total_bits} bits "
            f"(2^{total_bits} entries), limit is {limit}"
        )
        self.total_bits = total_bits
        self.limit = limit


class ParseError(QlutError, ValueError):
    """Malformed function expression."""

    def __init__(self, message: str, offset: int, expected: str | None = None):
        text = f"{message} at offset {offset}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)
        self.offset = offset
        self.message = message
        self.expected = expected


class DomainFault(QlutError, ArithmeticError):
    """Function evaluation left the real domain (log of a negative, pole, overflow...)."""

    def __init__(self, message: str, x: float, node=None):
        super().__init__(f"{message} at x={x!r}")
        self.x = x
        self.node = node


class CircuitError(QlutError, ValueError):
    """Invalid circuit construction (bad wire, overlapping registers, width mismatch)."""


class CircuitParseError(CircuitError):
    """Malformed ``qlut-circuit v1`` text."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
