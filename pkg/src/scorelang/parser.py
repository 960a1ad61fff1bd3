"""Concrete syntax for score programs.

Grammar::

    program := seq
    seq     := atom (";" atom)*            -- ";" associates to the right
    atom    := "SKIP" | "INC" ident | "DEC" ident | "PUSH" ident
             | "POP" ident | "FOR" ident "{" seq "}"
    ident   := [A-Za-z_][A-Za-z0-9_]*      -- keywords are reserved

Keywords are case-sensitive uppercase, "#" starts a comment running to the
end of the line, and whitespace (including newlines, in any convention) is
insignificant.  Program files conventionally use the ".score" extension.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .syntax import KEYWORDS, Dec, For, Inc, Pop, Push, Seq, Skip, Term

__all__ = ["ParseError", "parse"]


class ParseError(Exception):
    """A lexical or grammatical fault at a 1-based (line, column) position."""

    def __init__(self, line: int, column: int, message: str, expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message
        self.expected = tuple(expected)


class Token(NamedTuple):
    kind: str  # "keyword" | "ident" | "semi" | "lbrace" | "rbrace" | "eof"
    text: str
    line: int
    column: int


_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT_KINDS = {";": "semi", "{": "lbrace", "}": "rbrace"}


def split_lines(src: str) -> list[str]:
    """Split on any newline convention (LF, CRLF, CR)."""
    return src.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    lines = split_lines(src)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch in " \t\f\v":
                pos += 1
                continue
            if ch in _PUNCT_KINDS:
                tokens.append(Token(_PUNCT_KINDS[ch], ch, lineno, pos + 1))
                pos += 1
                continue
            m = _WORD_RE.match(line, pos)
            if m is None:
                raise ParseError(lineno, pos + 1, f"unexpected character {ch!r}")
            word = m.group()
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, lineno, pos + 1))
            pos = m.end()
    tokens.append(Token("eof", "", len(lines), len(lines[-1]) + 1))
    return tokens


def _show(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else f"'{tok.text}'"


_ATOM_EXPECTED = ("SKIP", "INC", "DEC", "PUSH", "POP", "FOR")
_UNARY = {"INC": Inc, "DEC": Dec, "PUSH": Push, "POP": Pop}


def _atom(tokens: list[Token], i: int) -> tuple[Term, int]:
    tok = tokens[i]
    if tok.kind == "keyword":
        if tok.text == "SKIP":
            return Skip(), i + 1
        if tok.text in _UNARY:
            name = tokens[i + 1]
            if name.kind != "ident":
                raise ParseError(
                    name.line,
                    name.column,
                    f"expected a variable name after {tok.text}, found {_show(name)}",
                    expected=("identifier",),
                )
            return _UNARY[tok.text](name.text), i + 2
        if tok.text == "FOR":
            name = tokens[i + 1]
            if name.kind != "ident":
                raise ParseError(
                    name.line,
                    name.column,
                    f"expected a variable name after FOR, found {_show(name)}",
                    expected=("identifier",),
                )
            opener = tokens[i + 2]
            if opener.kind != "lbrace":
                raise ParseError(
                    opener.line,
                    opener.column,
                    f"expected '{{' after FOR {name.text}, found {_show(opener)}",
                    expected=("{",),
                )
            body, j = _seq(tokens, i + 3)
            closer = tokens[j]
            if closer.kind != "rbrace":
                raise ParseError(
                    closer.line,
                    closer.column,
                    f"expected '}}' to close FOR {name.text}, found {_show(closer)}",
                    expected=("}",),
                )
            return For(name.text, body), j + 1
    raise ParseError(
        tok.line,
        tok.column,
        f"expected an instruction, found {_show(tok)}",
        expected=_ATOM_EXPECTED,
    )


def _seq(tokens: list[Token], i: int) -> tuple[Term, int]:
    parts: list[Term] = []
    term, i = _atom(tokens, i)
    parts.append(term)
    while tokens[i].kind == "semi":
        term, i = _atom(tokens, i + 1)
        parts.append(term)
    node = parts[-1]
    for left in reversed(parts[:-1]):
        node = Seq(left, node)
    return node, i


def parse(src: str) -> Term:
    """Parse program text into a term, raising ParseError on the first fault."""
    tokens = tokenize(src)
    term, i = _seq(tokens, 0)
    tok = tokens[i]
    if tok.kind != "eof":
        if tok.kind == "rbrace":
            raise ParseError(tok.line, tok.column, "unmatched '}'")
        raise ParseError(
            tok.line, tok.column, f"expected ';' or end of input, found {_show(tok)}", expected=(";",)
        )
    return term
