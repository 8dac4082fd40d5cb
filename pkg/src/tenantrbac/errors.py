"""Exception hierarchy shared by every module of the engine."""

from __future__ import annotations


class RBACError(Exception):
    """Base class for all errors raised by :mod:`tenantrbac`."""


class ModelError(RBACError, ValueError):
    """A role hierarchy or assignment violates a model invariant."""


class CycleError(ModelError):
    def __init__(self, message: str, cycle: tuple[str, ...] = ()):
        super().__init__(message)
        self.cycle = cycle


class UnknownRoleError(ModelError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class DuplicateRoleError(ModelError):
    pass


class UnknownSubjectError(ModelError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class DuplicateTenantError(ModelError):
    pass


class UnknownTenantError(ModelError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NamingCollisionError(RBACError, ValueError):
    """A naming scheme mapped two distinct roles or rules to one identifier."""


class PolicyParseError(RBACError, ValueError):
    """A policy or request document could not be turned into a node tree.

    ``line`` and ``column`` are 1-based positions of the offending element
    when known.
    """

    kind = "ParseError"

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    @property
    def position(self) -> tuple[int, int] | None:
        if self.line is None:
            return None
        return (self.line, self.column or 0)

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column}: {self.message}"


class WellFormednessError(PolicyParseError):
    kind = "WellFormedness"


class UnsupportedElementError(PolicyParseError):
    kind = "UnsupportedElement"


class InvalidDocumentError(PolicyParseError):
    """Supported elements arranged or attributed incorrectly."""

    kind = "InvalidDocument"


class UnknownCombiningAlgError(PolicyParseError):
    kind = "UnknownCombiningAlg"


class TypeMismatchError(PolicyParseError):
    kind = "TypeMismatch"


class RepositoryInvalidError(RBACError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"policy repository is invalid: {lines}")


class InvalidRequestError(RBACError, ValueError):
    pass


class FormatError(RBACError, ValueError):
    """A structured-text input file is malformed.

    Carries one ``(line, message)`` entry per defect.
    """

    def __init__(self, source: str, problems: list[tuple[int, str]]):
        self.source = source
        self.problems = list(problems)
        super().__init__("\n".join(self.lines()))

    def lines(self) -> list[str]:
        return [f"{self.source}:{line}: {msg}" for line, msg in self.problems]
