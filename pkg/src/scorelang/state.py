"""Machine states: integer cells with history stacks and repair counters.

A variable's cell is a triple ``(value, stack, counter)``:

* ``value`` -- the current integer, unbounded in both directions;
* ``stack`` -- the history of values saved by PUSH, top first;
* ``counter`` -- a non-negative count of currently-unmatched illegal pops,
  used by the total reversible semantics.  A cell with a positive counter
  is called *broken*.

A `State` is a total map from variable names to cells with finite support:
any name not explicitly bound reads as the default cell ``(0, (), 0)``, and
binding a name to the default is indistinguishable from not binding it.

State files (conventionally ".sst") are line based::

    line := ident "=" int [ "," "[" int ("," int)* "]" [ "," nat ] ]

with blank lines and "#" comments ignored, stacks written top-first, and
omitted fields defaulting (empty stack, zero counter).
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, NamedTuple

from .parser import ParseError, split_lines
from .syntax import KEYWORDS, is_identifier

__all__ = [
    "Cell",
    "DEFAULT_CELL",
    "State",
    "hd",
    "tl",
    "parse_state",
    "parse_state_declarations",
    "dump_state",
]


class Cell(NamedTuple):
    value: int
    stack: tuple[int, ...] = ()
    counter: int = 0

    @property
    def broken(self) -> bool:
        """True when the counter records unmatched illegal pops."""
        return self.counter > 0


DEFAULT_CELL = Cell(0, (), 0)


def hd(stack: tuple[int, ...]) -> int:
    """Total head: the top element, or 0 for the empty stack."""
    return stack[0] if stack else 0


def tl(stack: tuple[int, ...]) -> tuple[int, ...]:
    """Total tail: everything below the top; the empty stack is a fixed point."""
    return stack[1:]


def _as_cell(cell) -> Cell:
    value, stack, counter = cell
    stack = tuple(stack)
    if not isinstance(value, int):
        raise ValueError(f"cell value must be an integer, got {value!r}")
    if not all(isinstance(e, int) for e in stack):
        raise ValueError(f"cell stack must contain integers, got {stack!r}")
    if not isinstance(counter, int) or counter < 0:
        raise ValueError(f"cell counter must be a non-negative integer, got {counter!r}")
    return Cell(value, stack, counter)


class State:
    """Total map from variable names to cells, stored by finite support.

    Updates are persistent: `set` returns a new state and never mutates.
    Equality compares the maps as total functions, so explicitly stored
    default cells do not distinguish states.
    """

    __slots__ = ("_cells",)

    def __init__(self, cells: Mapping[str, Cell] | Iterable[tuple[str, Cell]] = ()):
        items = cells.items() if isinstance(cells, Mapping) else cells
        store: dict[str, Cell] = {}
        for name, cell in items:
            if not is_identifier(name):
                raise ValueError(f"invalid variable name: {name!r}")
            if type(cell) is not Cell or type(cell.stack) is not tuple:
                cell = _as_cell(cell)
            if cell != DEFAULT_CELL:
                store[name] = cell
        self._cells = store

    def get(self, name: str) -> Cell:
        """The cell bound to `name`, defaulting to (0, (), 0)."""
        return self._cells.get(name, DEFAULT_CELL)

    def set(self, name: str, cell: Cell) -> "State":
        """A new state with `name` bound to `cell`; the receiver is unchanged."""
        if not is_identifier(name):
            raise ValueError(f"invalid variable name: {name!r}")
        if type(cell) is not Cell or type(cell.stack) is not tuple:
            cell = _as_cell(cell)
        store = dict(self._cells)
        if cell == DEFAULT_CELL:
            store.pop(name, None)
        else:
            store[name] = cell
        new = object.__new__(State)
        new._cells = store
        return new

    def variables(self) -> frozenset[str]:
        """The support: names bound to a non-default cell."""
        return frozenset(self._cells)

    def as_dict(self) -> dict[str, Cell]:
        """A fresh dict of the support bindings."""
        return dict(self._cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        return hash(frozenset(self._cells.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self._cells.items()))
        return f"State({{{inner}}})"


_STATE_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|-?\d+|[=,\[\]]")
_INT_RE = re.compile(r"-?\d+\Z")


def _line_tokens(line: str, lineno: int) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(line):
        ch = line[pos]
        if ch in " \t\f\v":
            pos += 1
            continue
        m = _STATE_TOKEN_RE.match(line, pos)
        if m is None:
            raise ParseError(lineno, pos + 1, f"unexpected character {ch!r}")
        tokens.append((m.group(), pos + 1))
        pos = m.end()
    return tokens


def _parse_binding(line: str, lineno: int) -> tuple[str, Cell, int]:
    tokens = _line_tokens(line, lineno)
    end_col = len(line) + 1

    def at(i: int) -> tuple[str, int]:
        return tokens[i] if i < len(tokens) else ("", end_col)

    name, name_col = at(0)
    if name in KEYWORDS:
        raise ParseError(lineno, name_col, f"keyword {name!r} cannot be a variable name")
    if not is_identifier(name):
        raise ParseError(lineno, name_col, f"expected a variable name, found {name!r}", ("identifier",))
    eq, eq_col = at(1)
    if eq != "=":
        raise ParseError(lineno, eq_col, f"expected '=' after {name!r}", ("=",))
    value_tok, value_col = at(2)
    if not _INT_RE.match(value_tok):
        raise ParseError(lineno, value_col, "expected an integer value", ("integer",))
    value = int(value_tok)
    stack: tuple[int, ...] = ()
    counter = 0
    i = 3
    if i < len(tokens):
        comma, comma_col = at(i)
        if comma != ",":
            raise ParseError(lineno, comma_col, "expected ',' or end of line", (",",))
        opener, opener_col = at(i + 1)
        if opener != "[":
            raise ParseError(lineno, opener_col, "expected '[' to open the stack", ("[",))
        i += 2
        elems: list[int] = []
        tok, col = at(i)
        if tok != "]":
            while True:
                tok, col = at(i)
                if not _INT_RE.match(tok):
                    raise ParseError(lineno, col, "expected a stack element", ("integer",))
                elems.append(int(tok))
                i += 1
                tok, col = at(i)
                if tok == ",":
                    i += 1
                    continue
                break
        if tok != "]":
            raise ParseError(lineno, col, "expected ']' to close the stack", ("]",))
        i += 1
        stack = tuple(elems)
        if i < len(tokens):
            comma, comma_col = at(i)
            if comma != ",":
                raise ParseError(lineno, comma_col, "expected ',' or end of line", (",",))
            counter_tok, counter_col = at(i + 1)
            if not counter_tok.isdigit():
                raise ParseError(lineno, counter_col, "counter must be a non-negative integer", ("nat",))
            counter = int(counter_tok)
            i += 2
    if i < len(tokens):
        tok, col = at(i)
        raise ParseError(lineno, col, f"unexpected trailing input {tok!r}")
    return name, Cell(value, stack, counter), name_col


def parse_state_declarations(src: str) -> list[tuple[str, Cell]]:
    """All bindings of a state file, in file order; duplicates are an error.

    Unlike `parse_state`, explicitly declared default bindings are kept, so
    callers can tell which names the file mentioned.
    """
    declarations: list[tuple[str, Cell]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(split_lines(src), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        name, cell, name_col = _parse_binding(line, lineno)
        if name in seen:
            raise ParseError(lineno, name_col, f"duplicate binding for {name!r}")
        seen.add(name)
        declarations.append((name, cell))
    return declarations


def parse_state(src: str) -> State:
    """Parse a state file into a State, raising ParseError on any fault."""
    return State(parse_state_declarations(src))


def dump_state(state: State, names: Iterable[str]) -> str:
    """Render `names` (sorted) in the state file format, all fields explicit.

    Round trip: parsing the output agrees with `state` on `names`.
    """
    lines = []
    for name in sorted(set(names)):
        value, stack, counter = state.get(name)
        inner = ", ".join(str(e) for e in stack)
        lines.append(f"{name} = {value}, [{inner}], {counter}")
    return "\n".join(lines) + ("\n" if lines else "")
