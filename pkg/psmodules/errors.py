"""
errors.py – Exception hierarchy
===============================

Every error raised by the library derives from ``PSModulesError`` (itself a
``ValueError``), so callers can catch one type at the CLI boundary.
"""

from typing import Any, Optional, Tuple


class PSModulesError(ValueError):
    """Base class for all library errors."""


class DomainMismatchError(PSModulesError):
    """Operands live in different domains, or the domain kind is wrong."""


class InvalidArgumentError(PSModulesError):
    """Zero where a nonzero value is required, units where nonunits are, etc."""


class InvalidDivisorError(PSModulesError):
    """Division by zero."""


class UnsupportedError(PSModulesError):
    """The operation needs enumeration or factorization the domain lacks."""


class BoundExceededError(PSModulesError):
    """A saturation cap or search bound was hit."""


class InternalError(PSModulesError):
    """A self-check failed. This signals an arithmetic bug, not a math fact."""


class ParseError(PSModulesError):
    """Syntax error in a literal, with a 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"line {line}, column {column}: {message}")


class SemanticError(ParseError):
    """Well-formed literal that names nothing valid (e.g. m not squarefree)."""


class NotPrimalError(PSModulesError):
    """A primal split requested by the lift could not be found."""

    def __init__(self, element: Any, pair: Tuple[Any, Any], detail: Optional[str] = None):
        self.element = element
        self.pair = pair
        msg = f"{element} does not split against the pair {pair}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)
