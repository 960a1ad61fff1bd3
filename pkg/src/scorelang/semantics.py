"""Big-step evaluators for score programs.

Three semantics share the same control structure and differ only in how
PUSH and POP touch a variable's cell:

* ``eval_n`` -- the naive pair semantics.  PUSH saves the value on the
  stack and zeroes it; POP overwrites the value with the total head of the
  stack.  Total, but not reversible: POP forgets the value it overwrites.

* ``eval_a`` -- the assert-based pair semantics.  POP additionally demands
  a zero value and a non-empty stack and aborts the whole run otherwise,
  so every completed run can be undone.  Programs denote partial injective
  functions; aborts are reported as data, never as exceptions.

* ``eval_r`` -- the total reversible semantics on full (value, stack,
  counter) triples via `push_r` and `pop_r`.  No run ever aborts: an
  illegal pop merely increments the counter ("breaking" the variable), and
  a later push decrements it ("repairing"), so pushing and popping are
  exact mutual inverses on every cell.

Loops read their leader's value v once at entry and run the body |v|
times, using the inverted body when v is negative.  Since the leader
cannot occur in a well-formed body, every run terminates with work bounded
by the program size times the product of loop-entry magnitudes; no fuel or
timeout is involved.

All evaluators refuse ill-formed programs up front, and the two pair
semantics additionally refuse input states with a nonzero counter.
"""

from __future__ import annotations

from dataclasses import dataclass

from .state import Cell, DEFAULT_CELL, State, hd, tl
from .syntax import (
    Dec,
    For,
    Inc,
    Pop,
    Push,
    Seq,
    Skip,
    Term,
    Violation,
    check_well_formed,
    invert,
)

__all__ = [
    "AbortRecord",
    "Final",
    "Aborted",
    "RunOutcome",
    "TraceStep",
    "EvalError",
    "IllFormedProgramError",
    "NonzeroCounterError",
    "push_r",
    "pop_r",
    "eval_n",
    "eval_a",
    "eval_r",
    "eval_traced",
]


class EvalError(Exception):
    """A program or state rejected before execution starts."""


class IllFormedProgramError(EvalError):
    def __init__(self, violations: list[Violation]):
        leaders = ", ".join(sorted({v.leader for v in violations}))
        super().__init__(f"program is not well formed (leader(s) occur in loop body: {leaders})")
        self.violations = violations


class NonzeroCounterError(EvalError):
    def __init__(self, variable: str):
        super().__init__(f"variable {variable!r} has a nonzero counter; pair semantics require counter 0")
        self.variable = variable


@dataclass(frozen=True, slots=True)
class AbortRecord:
    """Why an assert-semantics run stopped.

    ``reason`` is "value-nonzero" (checked first) or "empty-stack";
    ``observed`` is the failing variable's (value, stack) view with counter
    0; ``trace_position`` is the 0-based execution index the failing
    instruction would have had.
    """

    instruction: str
    variable: str
    reason: str
    observed: Cell
    trace_position: int


@dataclass(frozen=True, slots=True)
class Final:
    state: State


@dataclass(frozen=True, slots=True)
class Aborted:
    record: AbortRecord


RunOutcome = Final | Aborted


@dataclass(frozen=True, slots=True)
class TraceStep:
    """Snapshot taken after one executed atomic instruction.

    ``state`` is the full state after the step, or None for the final
    aborting step, in which case ``abort`` carries the record.
    """

    index: int
    instruction: str
    variable: str
    state: State | None
    abort: AbortRecord | None = None


def push_r(cell: Cell) -> Cell:
    """Total reversible push, dispatching on the first matching clause:

    1. counter 0:                     save the value on the stack, zero it;
    2. value 0, non-empty, counter>0: leave the broken cell untouched;
    3. otherwise (counter>0):         repair one illegal pop (counter - 1).
    """
    value, stack, counter = cell
    if counter == 0:
        return Cell(0, (value, *stack), 0)
    if value == 0 and stack:
        return cell
    return Cell(value, stack, counter - 1)


def pop_r(cell: Cell) -> Cell:
    """Total reversible pop, dispatching on the first matching clause:

    1. value 0, non-empty, counter 0: pop the top into the value;
    2. value 0, non-empty, counter>0: leave the broken cell untouched;
    3. otherwise:                     count one illegal pop (counter + 1).

    Clause 3 fires exactly when the assert semantics would abort, so the
    counter records how many pops must be undone before the cell can act
    on its stack again.  `push_r` inverts each clause, giving
    ``pop_r(push_r(c)) == c == push_r(pop_r(c))`` for every cell.
    """
    value, stack, counter = cell
    if value == 0 and stack:
        if counter == 0:
            return Cell(stack[0], stack[1:], 0)
        return cell
    return Cell(value, stack, counter + 1)


class _AbortSignal(Exception):
    def __init__(self, record: AbortRecord):
        self.record = record


class _StepLog:
    """Counts executed atomic instructions; optionally snapshots each one."""

    __slots__ = ("count", "sink")

    def __init__(self, sink=None):
        self.count = 0
        self.sink = sink

    def note(self, instruction: str, variable: str, cells: dict[str, Cell]) -> None:
        index = self.count
        self.count = index + 1
        if self.sink is not None:
            self.sink(TraceStep(index, instruction, variable, State(dict(cells))))


def _run(term: Term, cells: dict[str, Cell], mode: str, log: _StepLog | None) -> None:
    match term:
        case Seq(first, second):
            _run(first, cells, mode, log)
            _run(second, cells, mode, log)
        case Inc(x):
            value, stack, counter = cells.get(x, DEFAULT_CELL)
            cells[x] = Cell(value + 1, stack, counter)
            if log is not None:
                log.note(f"INC {x}", x, cells)
        case Dec(x):
            value, stack, counter = cells.get(x, DEFAULT_CELL)
            cells[x] = Cell(value - 1, stack, counter)
            if log is not None:
                log.note(f"DEC {x}", x, cells)
        case Push(x):
            cell = cells.get(x, DEFAULT_CELL)
            if mode == "r":
                cells[x] = push_r(cell)
            else:
                cells[x] = Cell(0, (cell.value, *cell.stack), 0)
            if log is not None:
                log.note(f"PUSH {x}", x, cells)
        case Pop(x):
            cell = cells.get(x, DEFAULT_CELL)
            if mode == "r":
                cells[x] = pop_r(cell)
            elif mode == "n":
                cells[x] = Cell(hd(cell.stack), tl(cell.stack), 0)
            else:
                value, stack, _ = cell
                if value != 0:
                    raise _AbortSignal(
                        AbortRecord(f"POP {x}", x, "value-nonzero", Cell(value, stack, 0), log.count)
                    )
                if not stack:
                    raise _AbortSignal(
                        AbortRecord(f"POP {x}", x, "empty-stack", Cell(value, stack, 0), log.count)
                    )
                cells[x] = Cell(stack[0], stack[1:], 0)
            if log is not None:
                log.note(f"POP {x}", x, cells)
        case For(leader, body):
            count = cells.get(leader, DEFAULT_CELL).value
            program = body if count >= 0 else invert(body)
            for _ in range(abs(count)):
                _run(program, cells, mode, log)
        case Skip():
            pass
        case _:
            raise TypeError(f"not a term: {term!r}")


def _check_preconditions(term: Term, state: State, *, pair_view: bool) -> None:
    violations = check_well_formed(term)
    if violations:
        raise IllFormedProgramError(violations)
    if pair_view:
        for name in sorted(state.variables()):
            if state.get(name).counter != 0:
                raise NonzeroCounterError(name)


def eval_n(term: Term, state: State) -> State:
    """Run under the naive pair semantics; counters stay 0 throughout."""
    _check_preconditions(term, state, pair_view=True)
    cells = state.as_dict()
    _run(term, cells, "n", None)
    return State(cells)


def eval_a(term: Term, state: State) -> RunOutcome:
    """Run under the assert semantics: Final(state) or Aborted(record)."""
    _check_preconditions(term, state, pair_view=True)
    cells = state.as_dict()
    log = _StepLog()
    try:
        _run(term, cells, "a", log)
    except _AbortSignal as signal:
        return Aborted(signal.record)
    return Final(State(cells))


def eval_r(term: Term, state: State) -> State:
    """Run under the total reversible semantics; legal on every state."""
    _check_preconditions(term, state, pair_view=False)
    cells = state.as_dict()
    _run(term, cells, "r", None)
    return State(cells)


def eval_traced(term: Term, state: State, semantics: str = "r") -> list[TraceStep]:
    """Run like the chosen evaluator, snapshotting after every executed
    INC/DEC/PUSH/POP in execution order (loop bodies unfold; SKIP leaves no
    snapshot).  The last snapshot's state is the run's result, or carries
    the abort record under the assert semantics.
    """
    if semantics not in ("n", "a", "r"):
        raise ValueError(f"unknown semantics {semantics!r}; expected 'n', 'a' or 'r'")
    _check_preconditions(term, state, pair_view=semantics != "r")
    steps: list[TraceStep] = []
    log = _StepLog(steps.append)
    cells = state.as_dict()
    try:
        _run(term, cells, semantics, log)
    except _AbortSignal as signal:
        record = signal.record
        steps.append(TraceStep(record.trace_position, record.instruction, record.variable, None, record))
    return steps
