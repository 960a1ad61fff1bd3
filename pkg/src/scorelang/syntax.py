"""Abstract syntax for score programs.

A program is built from seven constructors: SKIP, INC x, DEC x, PUSH x,
POP x, sequencing, and bounded FOR loops.  Loops obey a well-formedness
proviso: the loop leader may not occur in the loop body.  That pins the
iteration count at loop entry and makes every construct invertible by a
purely syntactic transformation (`invert`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = frozenset({"SKIP", "INC", "DEC", "PUSH", "POP", "FOR"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Identifier = str


def is_identifier(name: str) -> bool:
    """True for a lexically valid, non-keyword variable name."""
    return bool(_IDENT_RE.match(name)) and name not in KEYWORDS


def _require_identifier(name: str) -> None:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise ValueError(f"invalid variable name: {name!r}")
    if name in KEYWORDS:
        raise ValueError(f"keyword {name!r} cannot be a variable name")


class Term:
    """Base class for program terms.

    Terms are immutable trees compared structurally; `Seq` is binary and
    non-associative at this level (the pretty-printer flattens it).
    """

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Skip(Term):
    pass


@dataclass(frozen=True, slots=True)
class Inc(Term):
    var: Identifier

    def __post_init__(self) -> None:
        _require_identifier(self.var)


@dataclass(frozen=True, slots=True)
class Dec(Term):
    var: Identifier

    def __post_init__(self) -> None:
        _require_identifier(self.var)


@dataclass(frozen=True, slots=True)
class Push(Term):
    var: Identifier

    def __post_init__(self) -> None:
        _require_identifier(self.var)


@dataclass(frozen=True, slots=True)
class Pop(Term):
    var: Identifier

    def __post_init__(self) -> None:
        _require_identifier(self.var)


@dataclass(frozen=True, slots=True)
class Seq(Term):
    first: Term
    second: Term


@dataclass(frozen=True, slots=True)
class For(Term):
    leader: Identifier
    body: Term

    def __post_init__(self) -> None:
        _require_identifier(self.leader)


def invert(term: Term) -> Term:
    """Structural inverse of a term.

    INC and DEC swap, PUSH and POP swap, sequences reverse and invert both
    arms, loops invert their body in place, SKIP is a fixed point.  The
    function is total (it does not require well-formedness, but preserves
    it) and self-dual: ``invert(invert(t)) == t``.
    """
    match term:
        case Skip():
            return term
        case Inc(x):
            return Dec(x)
        case Dec(x):
            return Inc(x)
        case Push(x):
            return Pop(x)
        case Pop(x):
            return Push(x)
        case Seq(first, second):
            return Seq(invert(second), invert(first))
        case For(leader, body):
            return For(leader, invert(body))
    raise TypeError(f"not a term: {term!r}")


def variables_of(term: Term) -> frozenset[Identifier]:
    """All identifiers occurring syntactically in `term` (targets and leaders)."""
    names: set[str] = set()
    todo = [term]
    while todo:
        t = todo.pop()
        match t:
            case Inc(x) | Dec(x) | Push(x) | Pop(x):
                names.add(x)
            case Seq(first, second):
                todo.append(first)
                todo.append(second)
            case For(leader, body):
                names.add(leader)
                todo.append(body)
            case Skip():
                pass
            case _:
                raise TypeError(f"not a term: {t!r}")
    return frozenset(names)


@dataclass(frozen=True, slots=True)
class Violation:
    """A loop leader occurring inside its own body.

    `path` is the chain of field names (``first``/``second``/``body``) from
    the checked term's root down to the offending node.
    """

    leader: Identifier
    path: tuple[str, ...]


def check_well_formed(term: Term, *, relaxed: bool = False) -> list[Violation]:
    """Collect loop-proviso violations; an empty list means well formed.

    The default (strict) reading forbids any occurrence of a FOR leader in
    its body: INC/DEC/PUSH/POP targets and nested FOR leaders alike, since
    all of them can disturb the leader's cell and hence the iteration
    count.  With ``relaxed=True`` only INC and DEC of the leader are
    rejected.
    """
    violations: list[Violation] = []

    def scan(t: Term, path: tuple[str, ...], banned: frozenset[str]) -> None:
        match t:
            case Skip():
                pass
            case Inc(x) | Dec(x):
                if x in banned:
                    violations.append(Violation(x, path))
            case Push(x) | Pop(x):
                if not relaxed and x in banned:
                    violations.append(Violation(x, path))
            case Seq(first, second):
                scan(first, path + ("first",), banned)
                scan(second, path + ("second",), banned)
            case For(leader, body):
                if not relaxed and leader in banned:
                    violations.append(Violation(leader, path))
                scan(body, path + ("body",), banned | {leader})
            case _:
                raise TypeError(f"not a term: {t!r}")

    scan(term, (), frozenset())
    return violations


def pretty(term: Term) -> str:
    """Concrete syntax for a term.

    Sequences render flat ("A; B; C") and loop bodies in braces, so the
    output of any parsed term parses back to an equal term.
    """
    match term:
        case Skip():
            return "SKIP"
        case Inc(x):
            return f"INC {x}"
        case Dec(x):
            return f"DEC {x}"
        case Push(x):
            return f"PUSH {x}"
        case Pop(x):
            return f"POP {x}"
        case Seq(first, second):
            return f"{pretty(first)}; {pretty(second)}"
        case For(leader, body):
            return f"FOR {leader} {{ {pretty(body)} }}"
    raise TypeError(f"not a term: {term!r}")
