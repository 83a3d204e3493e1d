"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    """One violated law, with the objects/arrows that witness it."""

    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.detail}

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.detail.items())
        return f"{self.kind}({inner})"


class FinsheafError(Exception):
    """Base class for all library errors."""


class ValidationError(FinsheafError):
    """Raised when a structure fails validation; carries every violation found."""

    def __init__(self, violations: list[Violation], what: str = "structure"):
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid {what}: {shown}{more}")

    @property
    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


class CategoryError(ValidationError):
    def __init__(self, violations: list[Violation]):
        super().__init__(violations, "category")


class NotAPartialOrder(ValidationError):
    def __init__(self, violations: list[Violation]):
        super().__init__(violations, "partial order")


class TopologyError(ValidationError):
    def __init__(self, violations: list[Violation]):
        super().__init__(violations, "topology")


class GeneratedFamilyNotATopology(TopologyError):
    pass


class PresheafError(ValidationError):
    def __init__(self, violations: list[Violation], what: str = "presheaf"):
        super().__init__(violations, what)


class UnknownObject(FinsheafError, KeyError):
    pass


class UnknownArrow(FinsheafError, KeyError):
    pass


class CodomainMismatch(FinsheafError, ValueError):
    pass


class NotAPoset(FinsheafError, ValueError):
    pass


class ElementNotInFiber(FinsheafError, KeyError):
    pass


class ShapeMismatch(FinsheafError, ValueError):
    pass


class NotSmall(FinsheafError, ValueError):
    pass


class NotASheaf(FinsheafError, ValueError):
    pass


class NotStabilized(FinsheafError, ValueError):
    pass


class CarrierTooLarge(FinsheafError, ValueError):
    pass


class RootMismatch(FinsheafError, ValueError):
    pass


class OpenFormula(FinsheafError, ValueError):
    pass


class UnknownLiteral(FinsheafError, KeyError):
    pass


class ParseError(FinsheafError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")
