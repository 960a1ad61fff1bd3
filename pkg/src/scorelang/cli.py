"""Command-line entry point.

Commands: run, invert, check, fuzz, oracle, trace.  Program files use the
".score" extension, state files ".sst".  Exit status: 0 on success, 1 on
an assert-semantics abort, 2 on usage or parse errors, 3 on a property
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .harness import (
    Fail,
    GenConfig,
    exhaustive_pop_injective,
    exhaustive_pop_push_inverse,
    run_fuzz,
)
from .parser import ParseError, parse
from .semantics import (
    AbortRecord,
    Aborted,
    IllFormedProgramError,
    NonzeroCounterError,
    eval_a,
    eval_n,
    eval_r,
    eval_traced,
)
from .state import State, dump_state, parse_state_declarations
from .syntax import Term, check_well_formed, invert, pretty, variables_of

EXIT_OK = 0
EXIT_ABORT = 1
EXIT_USAGE = 2
EXIT_PROPERTY = 3


@dataclass(frozen=True)
class CliInvocation:
    command: str
    program_path: str | None = None
    state_path: str | None = None
    semantics: str = "r"
    backward: bool = False
    options: dict = field(default_factory=dict)


class _UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_program(inv: CliInvocation) -> Term:
    term = parse(_read(inv.program_path))
    if inv.backward:
        term = invert(term)
    return term


def _load_state(inv: CliInvocation) -> tuple[State, frozenset[str]]:
    if inv.state_path is None:
        return State(), frozenset()
    declarations = parse_state_declarations(_read(inv.state_path))
    return State(declarations), frozenset(name for name, _ in declarations)


def _abort_lines(record: AbortRecord) -> list[str]:
    stack = ", ".join(str(e) for e in record.observed.stack)
    return [
        f"step: {record.trace_position + 1}",
        f"instruction: {record.instruction}",
        f"variable: {record.variable}",
        f"reason: {record.reason}",
        f"value: {record.observed.value}",
        f"stack: [{stack}]",
    ]


def cmd_run(inv: CliInvocation) -> int:
    term = _load_program(inv)
    initial, file_names = _load_state(inv)
    names = variables_of(term) | file_names
    if inv.semantics == "a":
        outcome = eval_a(term, initial)
        if isinstance(outcome, Aborted):
            print("ABORT")
            for line in _abort_lines(outcome.record):
                print(line)
            return EXIT_ABORT
        final = outcome.state
    elif inv.semantics == "n":
        final = eval_n(term, initial)
    else:
        final = eval_r(term, initial)
    print("FINAL")
    sys.stdout.write(dump_state(final, names))
    return EXIT_OK


def cmd_invert(inv: CliInvocation) -> int:
    term = parse(_read(inv.program_path))
    print(pretty(invert(term)))
    return EXIT_OK


def cmd_check(inv: CliInvocation) -> int:
    term = parse(_read(inv.program_path))
    violations = check_well_formed(term, relaxed=inv.options.get("relaxed", False))
    if not violations:
        print("ok")
        return EXIT_OK
    for violation in violations:
        print(f"violation: leader '{violation.leader}' occurs at {'.'.join(violation.path)}")
    return EXIT_PROPERTY


def cmd_fuzz(inv: CliInvocation) -> int:
    opts = inv.options
    cfg = GenConfig(
        seed=opts["seed"],
        max_depth=opts["max_depth"],
        max_vars=opts["max_vars"],
        value_range=(opts["value_min"], opts["value_max"]),
        max_stack_len=opts["max_stack_len"],
        max_counter=opts["max_counter"],
    )
    report = run_fuzz(cfg, opts["cases"])
    if opts.get("json"):
        print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK if report.ok else EXIT_PROPERTY


def cmd_oracle(inv: CliInvocation) -> int:
    opts = inv.options
    bounds = (opts["value"], opts["stack_len"], opts["elem"], opts["counter"])
    verdict = exhaustive_pop_push_inverse(*bounds)
    if isinstance(verdict, Fail):
        print(f"FAIL: {verdict.details}")
        return EXIT_PROPERTY
    print(f"{verdict.cases_run} cells checked")
    if opts.get("injectivity"):
        injective = exhaustive_pop_injective(*bounds)
        if isinstance(injective, Fail):
            print(f"FAIL: {injective.details}")
            return EXIT_PROPERTY
        print("0 collisions")
    return EXIT_OK


def cmd_trace(inv: CliInvocation) -> int:
    term = _load_program(inv)
    initial, file_names = _load_state(inv)
    names = variables_of(term) | file_names
    steps = eval_traced(term, initial, inv.semantics)
    final = initial
    for step in steps:
        if step.abort is not None:
            print(f"ABORT at step {step.index + 1}: {step.instruction}")
            print(f"reason: {step.abort.reason}")
            stack = ", ".join(str(e) for e in step.abort.observed.stack)
            print(f"value: {step.abort.observed.value}")
            print(f"stack: [{stack}]")
            return EXIT_ABORT
        print(f"step {step.index + 1}: {step.instruction}")
        sys.stdout.write(dump_state(step.state, {step.variable}))
        final = step.state
    print("FINAL")
    sys.stdout.write(dump_state(final, names))
    return EXIT_OK


def _build_argparser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="scorelang", description="Reversible stack language workbench.")
    sub = top.add_subparsers(dest="command", required=True)

    def add_program_command(name: str, help_text: str, with_state: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("program", help="program file (.score)")
        if with_state:
            p.add_argument("state", nargs="?", default=None, help="initial state file (.sst)")
            p.add_argument(
                "--semantics", "-s", choices=("n", "a", "r"), default="r", help="evaluator (default r)"
            )
            p.add_argument("--backward", action="store_true", help="run the inverted program")
        return p

    add_program_command("run", "run a program and print the final state")
    add_program_command("trace", "run a program printing one block per executed instruction")
    sub.add_parser("invert", help="print the inverse of a program").add_argument("program")
    check_p = sub.add_parser("check", help="check the loop-leader proviso")
    check_p.add_argument("program")
    check_p.add_argument("--relaxed", action="store_true", help="forbid only INC/DEC of loop leaders")

    fuzz_p = sub.add_parser("fuzz", help="randomized reversibility checks")
    fuzz_p.add_argument("--cases", type=int, default=1000)
    fuzz_p.add_argument("--seed", type=int, default=1)
    fuzz_p.add_argument("--max-depth", type=int, default=6)
    fuzz_p.add_argument("--max-vars", type=int, default=4)
    fuzz_p.add_argument("--value-min", type=int, default=-5)
    fuzz_p.add_argument("--value-max", type=int, default=5)
    fuzz_p.add_argument("--max-stack-len", type=int, default=4)
    fuzz_p.add_argument("--max-counter", type=int, default=2)
    fuzz_p.add_argument("--json", action="store_true", help="print a machine-readable summary")

    oracle_p = sub.add_parser("oracle", help="exhaustive push/pop inverse check on a cell grid")
    oracle_p.add_argument("--value", type=int, default=2, help="|value| bound")
    oracle_p.add_argument("--stack-len", type=int, default=3, help="stack length bound")
    oracle_p.add_argument("--elem", type=int, default=1, help="|stack element| bound")
    oracle_p.add_argument("--counter", type=int, default=2, help="counter bound")
    oracle_p.add_argument("--injectivity", action="store_true", help="also check pop for collisions")
    return top


def _invocation(args: argparse.Namespace) -> CliInvocation:
    known = {"command", "program", "state", "semantics", "backward"}
    options = {k: v for k, v in vars(args).items() if k not in known}
    return CliInvocation(
        command=args.command,
        program_path=getattr(args, "program", None),
        state_path=getattr(args, "state", None),
        semantics=getattr(args, "semantics", "r"),
        backward=getattr(args, "backward", False),
        options=options,
    )


_COMMANDS = {
    "run": cmd_run,
    "invert": cmd_invert,
    "check": cmd_check,
    "fuzz": cmd_fuzz,
    "oracle": cmd_oracle,
    "trace": cmd_trace,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_argparser().parse_args(argv)
    inv = _invocation(args)
    try:
        return _COMMANDS[inv.command](inv)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IllFormedProgramError, NonzeroCounterError, _UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
