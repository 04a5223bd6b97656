"""Tokenizer for HDDL text.

Identifiers and keywords are folded to lower case. A ``;`` starts a comment
running to the end of the line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List

from ..diagnostics import HDDLSyntaxError, SourceSpan


class Tok(enum.Enum):
    LPAREN = "("
    RPAREN = ")"
    ID = "identifier"
    VAR = "variable"
    KW = "keyword"
    DASH = "-"
    LT = "<"


@dataclass(frozen=True)
class Token:
    kind: Tok
    value: str
    span: SourceSpan

    @property
    def text(self) -> str:
        """Source form of the token (variables keep ``?``, keywords ``:``)."""
        if self.kind is Tok.VAR:
            return "?" + self.value
        if self.kind is Tok.KW:
            return ":" + self.value
        return self.value

    def __repr__(self):
        if self.kind in (Tok.ID, Tok.VAR, Tok.KW):
            return f"{self.kind.name}({self.value})"
        return self.kind.name


_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
_NAME_CHARS = _NAME_START | {"-"}


def tokenize(text: str, file: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span(l0, c0, length):
        return SourceSpan(file, l0, c0, l0, c0 + max(length, 1) - 1)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r\f\v":
            i += 1
            col += 1
            continue
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in "()<-=":
            kind = {"(": Tok.LPAREN, ")": Tok.RPAREN, "<": Tok.LT, "-": Tok.DASH, "=": Tok.ID}[c]
            tokens.append(Token(kind, c, span(line, col, 1)))
            i += 1
            col += 1
            continue
        if c in "?:":
            j = i + 1
            if j >= n or text[j] not in _NAME_START:
                raise HDDLSyntaxError(
                    f"'{c}' must be followed by a name", span(line, col, 1), ["name"]
                )
            while j < n and text[j] in _NAME_CHARS:
                j += 1
            kind = Tok.VAR if c == "?" else Tok.KW
            tokens.append(Token(kind, text[i + 1 : j].lower(), span(line, col, j - i)))
            col += j - i
            i = j
            continue
        if c in _NAME_START:
            j = i
            while j < n and text[j] in _NAME_CHARS:
                j += 1
            tokens.append(Token(Tok.ID, text[i:j].lower(), span(line, col, j - i)))
            col += j - i
            i = j
            continue
        raise HDDLSyntaxError(f"illegal character {c!r}", span(line, col, 1))
    return tokens


def end_span(text: str, file: str = "<input>") -> SourceSpan:
    """Span of the last character of ``text`` (used for end-of-input errors)."""
    if not text:
        return SourceSpan(file, 1, 1, 1, 1)
    body = text.rstrip("\n") or text[:1]
    lines = body.split("\n")
    line = len(lines)
    col = max(len(lines[-1]), 1)
    return SourceSpan(file, line, col, line, col)
