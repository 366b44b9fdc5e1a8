"""gentwist errors library."""

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"


class GentwistError(Exception):
    """Base error."""


class ValidationError(GentwistError):
    """Input violates a structural identity."""

    def __init__(self, identity: str, residual: float | None = None) -> None:
        self.identity = identity
        self.residual = residual
        message = identity if residual is None else f"{identity} (max residual {residual:.3e})"
        super().__init__(message)


class NumericalError(GentwistError):
    """Computation hit a numerically degenerate case."""


class PreconditionError(GentwistError):
    """Operation precondition does not hold."""


class DomainRestrictionError(GentwistError):
    """Field evaluated outside the region where it is defined."""


class ExprSyntaxError(GentwistError):
    """Expression text does not match the grammar."""

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()) -> None:
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"{message} at line {line}, column {column}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)


class UnknownIdentifierError(GentwistError):
    """Expression references a symbol that is neither a coordinate nor a function."""

    def __init__(self, symbol: str, line: int, column: int) -> None:
        self.symbol = symbol
        self.line = line
        self.column = column
        super().__init__(f"unknown identifier `{symbol}` at line {line}, column {column}")


class ExprDomainError(GentwistError):
    """Expression is undefined at the evaluation point."""

    def __init__(self, reason: str, subexpression: str) -> None:
        self.reason = reason
        self.subexpression = subexpression
        super().__init__(f"{reason} in `{subexpression}`")


class SpecError(GentwistError):
    """Manifold spec file is invalid."""


class ConfigError(GentwistError):
    """Check configuration is invalid."""
