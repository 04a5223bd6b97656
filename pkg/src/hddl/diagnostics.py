"""Source spans, diagnostics and the error types shared by every stage."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(
            self.file, self.start_line, self.start_col, other.end_line, other.end_col
        )

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Optional[SourceSpan] = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def format(self, color: bool = False) -> str:
        where = str(self.span) if self.span else "<input>:1:1"
        sev = self.severity
        if color:
            sev = ("\x1b[31m" if self.is_error else "\x1b[33m") + sev + "\x1b[0m"
        return f"{where}: {sev}: {self.message}"

    def to_json(self) -> str:
        span = self.span
        return json.dumps(
            {
                "file": span.file if span else "<input>",
                "line": span.start_line if span else 1,
                "col": span.start_col if span else 1,
                "severity": self.severity,
                "code": self.code,
                "message": self.message,
            },
            sort_keys=True,
        )


class HDDLError(Exception):
    """Base class for every error raised by the toolchain."""


class HDDLSyntaxError(HDDLError):
    def __init__(self, message: str, span: SourceSpan, expected: Iterable[str] = ()):
        self.span = span
        self.expected = tuple(sorted(set(expected)))
        text = message
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(text)

    @property
    def diagnostic(self) -> Diagnostic:
        return Diagnostic(ERROR, "syntax", str(self), self.span)


class HDDLSemanticError(HDDLError):
    """Raised when analysis produced at least one error diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        first = errors[0].format() if errors else "semantic error"
        super().__init__(f"{len(errors)} error(s); first: {first}")
