"""Exception types. Every error carries a stable ``code`` string."""

from __future__ import annotations


class AcoRouteError(Exception):
    """Base class for all package errors."""

    code = "ERROR"

    def __init__(self, message: str = "", code: str | None = None):
        if code is not None:
            self.code = code
        super().__init__(f"{self.code}: {message}" if message else self.code)

    def __str__(self):
        return str(self.args[0]) if self.args else self.code


class InvalidInstanceError(AcoRouteError, ValueError):
    """An Instance (or its distance matrix) breaks a model invariant.

    ``rule`` names the invariant, e.g. ``"nonnegative distances"``.
    """

    code = "INVARIANT_VIOLATION"

    def __init__(self, message: str, code: str | None = None, rule: str | None = None):
        self.rule = rule
        super().__init__(message, code)


class InfeasibleSolutionError(AcoRouteError, ValueError):
    code = "INFEASIBLE_SOLUTION"

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"{v.kind.value}({v.detail})" for v in self.violations)
        super().__init__(detail)


class ParseError(AcoRouteError, ValueError):
    """Document could not be turned into a model object.

    ``code`` is one of MALFORMED_SYNTAX, SCHEMA_VIOLATION, INVARIANT_VIOLATION;
    ``where`` is the offending field path or the violated rule name.
    """

    code = "SCHEMA_VIOLATION"

    def __init__(self, message: str, code: str | None = None, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message, code)


class TooLargeError(AcoRouteError, ValueError):
    code = "TOO_LARGE"


class NotFoundError(AcoRouteError, KeyError):
    code = "NOT_FOUND"


class MalformedEventError(AcoRouteError, ValueError):
    code = "MALFORMED_EVENT"


class InvalidArgumentError(AcoRouteError, ValueError):
    """Bad call arguments; ``code`` names the broken precondition."""

    code = "INVALID_ARGUMENT"


class OutputError(AcoRouteError, OSError):
    code = "IO_FAILURE"
