"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class AfdlError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{self.severity}: {where}{self.code}: {self.message}"


class ValidationError(AfdlError):
    """An AFDT failed validation; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

    @property
    def codes(self) -> set[str]:
        return {d.code for d in self.diagnostics}


class SourceError(AfdlError):
    """An error tied to a position in some source text."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")


class AfdtSyntaxError(SourceError):
    pass


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class NestedQuantifier(ParseError):
    pass


class UnknownDecoratorSyntax(ParseError):
    pass


class UnknownNode(AfdlError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"unknown node {node!r}")


class UnboundNode(UnknownNode):
    """A formula refers to a node the AFDT does not have."""


class TranslationError(AfdlError):
    pass


class UnknownIdentifier(TranslationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"identifier {name!r} does not name a node of the model")


class UndeclaredDecorator(TranslationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"decorator @{name} is applied but never declared")


class MultipleActions(ParseError):
    pass


class MissingScenario(AfdlError):
    def __init__(self) -> None:
        super().__init__("a Boolean query needs a risk scenario (use --scenario)")


class DomainTooLarge(AfdlError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(
            f"{size} free leaves exceed the cap of {cap}; "
            "pin more nodes with evidence or raise the cap"
        )
