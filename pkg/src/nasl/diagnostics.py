"""Source spans, diagnostics and the exceptions that carry them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def __post_init__(self):
        if min(self.line_start, self.col_start, self.line_end, self.col_end) < 1:
            raise ValueError(f"span positions are 1-based: {self}")
        if (self.line_start, self.col_start) > (self.line_end, self.col_end):
            raise ValueError(f"span starts after it ends: {self}")

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        start = min((self.line_start, self.col_start), (other.line_start, other.col_start))
        end = max((self.line_end, self.col_end), (other.line_end, other.col_end))
        return SourceSpan(self.file, start[0], start[1], end[0], end[1])

    def contains(self, other: "SourceSpan") -> bool:
        return (self.line_start, self.col_start) <= (other.line_start, other.col_start) and (
            other.line_end,
            other.col_end,
        ) <= (self.line_end, self.col_end)

    def __str__(self):
        return f"{self.file}:{self.line_start}:{self.col_start}"


NO_SPAN = SourceSpan("<builtin>", 1, 1, 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    phase: str  # "parse" | "domain" | "type" | "runtime"
    code: str
    message: str
    span: SourceSpan
    notes: tuple[tuple[str, Optional[SourceSpan]], ...] = ()

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def render(self) -> str:
        lines = [f"{self.span}: {self.severity}: {self.message}"]
        for text, where in self.notes:
            prefix = f"{where}: " if where is not None else ""
            lines.append(f"{prefix}note: {text}")
        return "\n".join(lines)


def error(phase: str, code: str, message: str, span: SourceSpan, notes=()) -> Diagnostic:
    return Diagnostic("error", phase, code, message, span, tuple(notes))


def warning(phase: str, code: str, message: str, span: SourceSpan, notes=()) -> Diagnostic:
    return Diagnostic("warning", phase, code, message, span, tuple(notes))


class NaslError(Exception):
    """Raised by the front end; carries every diagnostic collected so far."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.render() for d in self.diagnostics))


class LexError(NaslError):
    pass


class ParseError(NaslError):
    @property
    def at_eof(self) -> bool:
        return any(d.code == "UnexpectedEOF" for d in self.diagnostics)
