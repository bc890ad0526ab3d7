"""Exception hierarchy shared by the toolkit.

Every error that can reach the CLI is a ``DomainError`` so the front-end can
map it to exit status 1 with a JSON payload.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all domain-level failures."""

    kind = "domain_error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class FormulaError(DomainError, ValueError):
    kind = "formula_error"


class FormulaSyntaxError(FormulaError):
    kind = "syntax_error"

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self), "position": self.pos}


class NotACodeError(FormulaError):
    kind = "not_a_code"


class NotNormalizedError(FormulaError):
    kind = "not_normalized"


class NotDelta0Error(DomainError):
    kind = "not_delta0"


class UnboundVariableError(DomainError, KeyError):
    kind = "unbound_variable"

    def __str__(self) -> str:
        return Exception.__str__(self)


class StructureError(DomainError):
    """The finite structure ([0,N], I) is malformed (e.g. I not inside [0,N])."""

    kind = "structure_error"


class InsufficientRamseyRoom(DomainError):
    kind = "insufficient_ramsey_room"

    def __init__(self, message: str, best: list[int] | None = None):
        self.best = list(best or [])
        super().__init__(message)

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self), "best": self.best}


class GuardUnreachable(DomainError):
    kind = "guard_unreachable"


class IExhausted(DomainError):
    kind = "i_exhausted"
