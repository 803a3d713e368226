"""Diagnostic records shared by the lexer, parser, checker, and CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    message: str
    file: str
    line: int
    column: int

    def render(self) -> str:
        return f"{self.file}:{self.line}:{self.column}: {self.severity} {self.code}: {self.message}"


@dataclass
class DiagnosticSink:
    """Collects diagnostics during a pipeline phase."""

    items: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, message: str, file: str, line: int, column: int) -> None:
        self.items.append(Diagnostic(code, ERROR, message, file, line, column))

    def warning(self, code: str, message: str, file: str, line: int, column: int) -> None:
        self.items.append(Diagnostic(code, WARNING, message, file, line, column))

    def extend(self, other: "DiagnosticSink") -> None:
        self.items.extend(other.items)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == WARNING]

    def has_errors(self) -> bool:
        return any(d.severity == ERROR for d in self.items)

    def codes(self) -> list[str]:
        return [d.code for d in self.items]
