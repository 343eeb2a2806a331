"""Exception hierarchy. Every error carries a stable ``code`` string."""

from __future__ import annotations


class MipolyError(Exception):
    code = "ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DomainError(MipolyError, ValueError):
    """Input outside an operation's mathematical domain."""

    code = "DOMAIN"


class FamilyError(MipolyError, ValueError):
    """Raised by family validation.

    Codes: TOO_SHORT, DUPLICATE, ZERO_OR_ONE, NOT_SQUAREFREE.
    """

    code = "INVALID_FAMILY"


class SearchExhausted(MipolyError):
    code = "SEARCH_EXHAUSTED"


class UnsupportedDivisorSize(MipolyError, ValueError):
    code = "UNSUPPORTED_DIVISOR_SIZE"


class NotIntersectiveBase(MipolyError):
    code = "NOT_INTERSECTIVE_BASE"


class SchemaError(MipolyError, ValueError):
    """Malformed certificate document."""

    code = "SCHEMA"
