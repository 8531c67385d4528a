"""Tokenizer for the specification language."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import LexError, SourceSpan, error

KEYWORDS = {"domain", "syntax", "let", "system", "end", "evaluate", "in", "if", "true", "false"}
BASIC_TYPES = {"Int", "String", "Bool", "Symbol"}

# longest first
OPERATORS = [
    "[[", "]]", "\\\\", "==>", "==", "!=", "<=", "|-", "-|", "->",
    "\\", "<", "=", "+", "-", "*", ";", ":", ",", ".", "(", ")", "{", "}", "[", "]", "|",
]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")
NAMED_ARROW_RE = re.compile(r"=([A-Za-z_][A-Za-z0-9_]*'*)=>")
LABEL_RE = re.compile(r"\s*([A-Za-z0-9_-]+)\s*(\]\])")
STRING_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # operator/keyword text itself, or a category name
    lexeme: str
    span: SourceSpan

    def __str__(self):
        if self.kind == "eof":
            return "end of input"
        if self.kind in ("ident", "int", "basic", "label"):
            return f"{self.kind} '{self.lexeme}'"
        if self.kind == "named_arrow":
            return f"'={self.lexeme}=>'"
        if self.kind in ("string", "symbol", "terminal"):
            return f"{self.kind} literal"
        return f"'{self.lexeme}'"


class _Cursor:
    def __init__(self, source: str, file: str):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def peek(self, n: int = 0) -> str:
        i = self.pos + n
        return self.src[i] if i < len(self.src) else ""

    def startswith(self, text: str) -> bool:
        return self.src.startswith(text, self.pos)

    def advance(self, n: int = 1) -> str:
        text = self.src[self.pos:self.pos + n]
        for ch in text:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += len(text)
        return text

    def span_from(self, line: int, col: int) -> SourceSpan:
        # end is the last consumed character; empty tokens get a 1-column span
        end_line, end_col = self.line, max(self.col - 1, 1)
        if (end_line, end_col) < (line, col):
            end_line, end_col = line, col
        return SourceSpan(self.file, line, col, end_line, end_col)

    def fail(self, message: str, line: int, col: int):
        raise LexError([error("parse", "LexError", message, SourceSpan(self.file, line, col, line, col))])


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    cur = _Cursor(source, file)
    tokens: list[Token] = []
    while True:
        _skip_blank(cur)
        line, col = cur.line, cur.col
        ch = cur.peek()
        if not ch:
            tokens.append(Token("eof", "", SourceSpan(file, line, col, line, col)))
            return tokens
        if ch.isdigit():
            digits = re.match(r"[0-9]+", source[cur.pos:]).group()
            cur.advance(len(digits))
            tokens.append(Token("int", digits, cur.span_from(line, col)))
        elif ch.isalpha() or ch == "_":
            word = IDENT_RE.match(source, cur.pos).group()
            cur.advance(len(word))
            kind = word if word in KEYWORDS else "basic" if word in BASIC_TYPES else "ident"
            tokens.append(Token(kind, word, cur.span_from(line, col)))
        elif ch == '"':
            tokens.append(_string(cur, line, col))
        elif ch in "`'":
            tokens.append(_quoted(cur, ch, line, col))
        elif ch == "=" and NAMED_ARROW_RE.match(source, cur.pos):
            match = NAMED_ARROW_RE.match(source, cur.pos)
            cur.advance(len(match.group()))
            tokens.append(Token("named_arrow", match.group(1), cur.span_from(line, col)))
        else:
            op = next((o for o in OPERATORS if cur.startswith(o)), None)
            if op is None:
                cur.fail(f"unexpected character {ch!r}", line, col)
            cur.advance(len(op))
            tokens.append(Token(op, op, cur.span_from(line, col)))
            if op == "[[":
                tokens.extend(_label(cur))


def _skip_blank(cur: _Cursor):
    while True:
        ch = cur.peek()
        if ch and ch.isspace():
            cur.advance()
        elif cur.startswith("//"):
            while cur.peek() and cur.peek() != "\n":
                cur.advance()
        else:
            return


def _label(cur: _Cursor) -> list[Token]:
    match = LABEL_RE.match(cur.src, cur.pos)
    if not match:
        cur.fail("malformed rule label; expected letters, digits, '_' or '-' followed by ']]'", cur.line, cur.col)
    cur.advance(match.start(1) - cur.pos)
    line, col = cur.line, cur.col
    cur.advance(len(match.group(1)))
    label = Token("label", match.group(1), cur.span_from(line, col))
    cur.advance(match.start(2) - cur.pos)
    line, col = cur.line, cur.col
    cur.advance(2)
    return [label, Token("]]", "]]", cur.span_from(line, col))]


def _string(cur: _Cursor, line: int, col: int) -> Token:
    cur.advance()
    chars = []
    while True:
        ch = cur.peek()
        if not ch or ch == "\n":
            cur.fail("unterminated string literal", line, col)
        cur.advance()
        if ch == '"':
            return Token("string", "".join(chars), cur.span_from(line, col))
        if ch == "\\":
            esc = cur.peek()
            if esc not in STRING_ESCAPES:
                cur.fail(f"unknown escape sequence \\{esc}", cur.line, cur.col)
            cur.advance()
            chars.append(STRING_ESCAPES[esc])
        else:
            chars.append(ch)


def _quoted(cur: _Cursor, quote: str, line: int, col: int) -> Token:
    kind = "symbol" if quote == "`" else "terminal"
    cur.advance()
    start = cur.pos
    while cur.peek() != quote:
        if not cur.peek() or cur.peek() == "\n":
            cur.fail(f"unterminated {kind} literal", line, col)
        cur.advance()
    text = cur.src[start:cur.pos]
    cur.advance()
    if not text:
        cur.fail(f"empty {kind} literal", line, col)
    return Token(kind, text, cur.span_from(line, col))
