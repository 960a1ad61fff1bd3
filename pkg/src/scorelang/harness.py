"""Randomized and exhaustive checks of the reversibility guarantees.

The harness generates well-formed programs and matching states, runs the
reversibility checks on them, enumerates small cell grids to confirm the
push/pop inverse guarantee, and shrinks any counterexample it finds to a
minimal replayable (program, state) pair.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .semantics import Aborted, Final, eval_a, eval_r, pop_r, push_r
from .state import Cell, DEFAULT_CELL, State, dump_state
from .syntax import Dec, For, Inc, Pop, Push, Seq, Skip, Term, invert, pretty, variables_of

__all__ = [
    "GenConfig",
    "Pass",
    "Fail",
    "Verdict",
    "FailureCorrespondence",
    "CheckCounts",
    "FuzzWitness",
    "FuzzReport",
    "gen_term",
    "gen_state",
    "check_strong_reversibility",
    "check_weak_reversibility_a",
    "check_agreement_a_r",
    "check_failure_correspondence",
    "exhaustive_pop_push_inverse",
    "exhaustive_pop_injective",
    "minimize",
    "run_fuzz",
    "zero_counters",
]

_CONSTRUCTORS = ("skip", "inc", "dec", "push", "pop", "seq", "for")


def _uniform_weights() -> dict[str, int]:
    return dict.fromkeys(_CONSTRUCTORS, 1)


@dataclass(frozen=True)
class GenConfig:
    """Knobs for random program and state generation.

    The defaults keep worst-case loop-unfolding products small while still
    covering every push/pop clause combination.
    """

    seed: int = 1
    max_depth: int = 6
    max_vars: int = 4
    value_range: tuple[int, int] = (-5, 5)
    max_stack_len: int = 4
    max_counter: int = 2
    weights: Mapping[str, int] = field(default_factory=_uniform_weights)

    def __post_init__(self) -> None:
        lo, hi = self.value_range
        if lo > hi:
            raise ValueError(f"empty value range: {self.value_range}")
        if self.max_depth < 1 or self.max_vars < 1:
            raise ValueError("max_depth and max_vars must be positive")
        if self.max_stack_len < 0 or self.max_counter < 0:
            raise ValueError("max_stack_len and max_counter must be non-negative")
        unknown = set(self.weights) - set(_CONSTRUCTORS)
        if unknown:
            raise ValueError(f"unknown constructor weights: {sorted(unknown)}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")
        if not any(self.weights.get(c, 0) > 0 for c in _CONSTRUCTORS):
            raise ValueError("at least one constructor weight must be positive")


@dataclass(frozen=True)
class Pass:
    cases_run: int = 1
    vacuous: bool = False


@dataclass(frozen=True)
class Fail:
    """A replayable counterexample; program/initial are None only for the
    cell-grid oracle, which checks cells rather than runs."""

    program: Term | None
    initial: State | None
    details: str
    minimized: bool = False


Verdict = Pass | Fail


_NAME_POOL = "xyzwuvst"


def _var_names(count: int) -> list[str]:
    return [_NAME_POOL[i] if i < len(_NAME_POOL) else f"x{i}" for i in range(count)]


def _gen(cfg: GenConfig, rng: random.Random, names: list[str], depth: int, allow_seq: bool) -> Term:
    choices: list[str] = []
    weights: list[int] = []
    for ctor in _CONSTRUCTORS:
        w = cfg.weights.get(ctor, 0)
        if w <= 0:
            continue
        if ctor in ("inc", "dec", "push", "pop", "for") and not names:
            continue
        if ctor in ("seq", "for") and depth < 2:
            continue
        if ctor == "seq" and not allow_seq:
            continue
        choices.append(ctor)
        weights.append(w)
    if not choices:
        return Skip()
    ctor = rng.choices(choices, weights)[0]
    if ctor == "skip":
        return Skip()
    if ctor == "inc":
        return Inc(rng.choice(names))
    if ctor == "dec":
        return Dec(rng.choice(names))
    if ctor == "push":
        return Push(rng.choice(names))
    if ctor == "pop":
        return Pop(rng.choice(names))
    if ctor == "seq":
        # first arm never a Seq, so spines come out right-associated and
        # therefore identical to what the parser would produce
        first = _gen(cfg, rng, names, depth - 1, allow_seq=False)
        second = _gen(cfg, rng, names, depth - 1, allow_seq=True)
        return Seq(first, second)
    leader = rng.choice(names)
    body = _gen(cfg, rng, [n for n in names if n != leader], depth - 1, allow_seq=True)
    return For(leader, body)


def gen_term(cfg: GenConfig, rng: random.Random | None = None) -> Term:
    """A well-formed term of depth <= max_depth, deterministic in the seed.

    Loop leaders are excluded from the identifiers available to their body,
    so the well-formedness proviso holds by construction.
    """
    if rng is None:
        rng = random.Random(cfg.seed)
    return _gen(cfg, rng, _var_names(cfg.max_vars), cfg.max_depth, allow_seq=True)


def gen_state(cfg: GenConfig, names: Iterable[str], rng: random.Random | None = None) -> State:
    """A random state over `names`, deterministic in the seed."""
    if rng is None:
        rng = random.Random(cfg.seed)
    lo, hi = cfg.value_range
    cells: dict[str, Cell] = {}
    for name in sorted(set(names)):
        value = rng.randint(lo, hi)
        stack = tuple(rng.randint(lo, hi) for _ in range(rng.randint(0, cfg.max_stack_len)))
        counter = rng.randint(0, cfg.max_counter)
        cells[name] = Cell(value, stack, counter)
    return State(cells)


def zero_counters(state: State) -> State:
    """The same state with every counter projected to 0."""
    return State({name: Cell(c.value, c.stack, 0) for name, c in state.as_dict().items()})


def _first_diff(expected: State, got: State) -> str:
    for name in sorted(expected.variables() | got.variables()):
        if expected.get(name) != got.get(name):
            return f"{name}: expected {tuple(expected.get(name))}, got {tuple(got.get(name))}"
    return "states differ"


def check_strong_reversibility(program: Term, initial: State) -> Verdict:
    """P;-P and -P;P must both restore `initial` exactly under eval_r."""
    inverse = invert(program)
    after = eval_r(Seq(program, inverse), initial)
    if after != initial:
        return Fail(program, initial, f"P;-P changed the state: {_first_diff(initial, after)}")
    after = eval_r(Seq(inverse, program), initial)
    if after != initial:
        return Fail(program, initial, f"-P;P changed the state: {_first_diff(initial, after)}")
    return Pass()


def check_weak_reversibility_a(program: Term, initial: State) -> Verdict:
    """A completed assert-semantics run must be undone exactly by the
    inverse program; aborting runs pass vacuously."""
    outcome = eval_a(program, initial)
    if isinstance(outcome, Aborted):
        return Pass(vacuous=True)
    back = eval_a(invert(program), outcome.state)
    if isinstance(back, Aborted):
        return Fail(program, initial, f"inverse run aborted: {back.record.reason} on {back.record.variable}")
    if back.state != initial:
        return Fail(program, initial, f"inverse run missed the start: {_first_diff(initial, back.state)}")
    return Pass()


def check_agreement_a_r(program: Term, initial: State) -> Verdict:
    """A completed assert-semantics run must match the reversible run with
    all counters 0; aborting runs pass vacuously."""
    outcome = eval_a(program, initial)
    if isinstance(outcome, Aborted):
        return Pass(vacuous=True)
    reversible = eval_r(program, initial)
    if reversible != outcome.state:
        return Fail(program, initial, f"semantics disagree: {_first_diff(outcome.state, reversible)}")
    broken = [n for n in sorted(reversible.variables()) if reversible.get(n).broken]
    if broken:
        return Fail(program, initial, f"reversible run left broken variables: {broken}")
    return Pass()


@dataclass(frozen=True)
class FailureCorrespondence:
    """How an aborting assert run relates to the reversible run's final
    broken variables.

    ``direction_witness`` is "only-if" when the assert run aborted but the
    reversible run repaired everything (a discrepancy that is reported,
    not failed), "if" when the reversible run ended broken without an
    abort (never expected), and None when the two agree.
    """

    a_aborted: bool
    r_final_broken: bool
    direction_witness: str | None


def check_failure_correspondence(program: Term, initial: State) -> FailureCorrespondence:
    aborted = isinstance(eval_a(program, initial), Aborted)
    final = eval_r(program, initial)
    broken = any(final.get(n).broken for n in final.variables())
    if aborted and not broken:
        witness = "only-if"
    elif broken and not aborted:
        witness = "if"
    else:
        witness = None
    return FailureCorrespondence(aborted, broken, witness)


def _enumerate_cells(
    value_bound: int, stack_len_bound: int, elem_bound: int, counter_bound: int
) -> Iterator[Cell]:
    values = range(-value_bound, value_bound + 1)
    elems = range(-elem_bound, elem_bound + 1)
    counters = range(counter_bound + 1)
    for value in values:
        for length in range(stack_len_bound + 1):
            for stack in itertools.product(elems, repeat=length):
                for counter in counters:
                    yield Cell(value, stack, counter)


def exhaustive_pop_push_inverse(
    value_bound: int, stack_len_bound: int, elem_bound: int, counter_bound: int
) -> Verdict:
    """Brute-force check that pop and push are mutual inverses on every
    cell with |value| <= value_bound, stack length <= stack_len_bound,
    |elements| <= elem_bound, and counter <= counter_bound."""
    count = 0
    for cell in _enumerate_cells(value_bound, stack_len_bound, elem_bound, counter_bound):
        count += 1
        roundtrip = pop_r(push_r(cell))
        if roundtrip != cell:
            return Fail(None, None, f"pop(push({tuple(cell)})) = {tuple(roundtrip)}")
        roundtrip = push_r(pop_r(cell))
        if roundtrip != cell:
            return Fail(None, None, f"push(pop({tuple(cell)})) = {tuple(roundtrip)}")
    return Pass(cases_run=count)


def exhaustive_pop_injective(
    value_bound: int, stack_len_bound: int, elem_bound: int, counter_bound: int
) -> Verdict:
    """Check that pop_r never maps two distinct grid cells to equal cells."""
    seen: dict[Cell, Cell] = {}
    count = 0
    for cell in _enumerate_cells(value_bound, stack_len_bound, elem_bound, counter_bound):
        count += 1
        image = pop_r(cell)
        other = seen.get(image)
        if other is not None:
            return Fail(None, None, f"pop collision: {tuple(other)} and {tuple(cell)} -> {tuple(image)}")
        seen[image] = cell
    return Pass(cases_run=count)


def _term_shrinks(term: Term) -> Iterator[Term]:
    match term:
        case Seq(first, second):
            yield first
            yield second
            for smaller in _term_shrinks(first):
                yield Seq(smaller, second)
            for smaller in _term_shrinks(second):
                yield Seq(first, smaller)
        case For(leader, body):
            yield body
            for smaller in _term_shrinks(body):
                yield For(leader, smaller)
        case Skip():
            return
        case _:
            yield Skip()


def _toward_zero(value: int) -> list[int]:
    candidates = []
    if value != 0:
        candidates.append(0)
        half = int(value / 2)
        if half != value:
            candidates.append(half)
        step = value - 1 if value > 0 else value + 1
        if step not in (value, *candidates):
            candidates.append(step)
    return candidates


def _state_shrinks(state: State) -> Iterator[State]:
    for name in sorted(state.variables()):
        value, stack, counter = state.get(name)
        yield state.set(name, DEFAULT_CELL)
        for smaller in _toward_zero(value):
            yield state.set(name, Cell(smaller, stack, counter))
        if stack:
            yield state.set(name, Cell(value, stack[1:], counter))
            yield state.set(name, Cell(value, stack[:-1], counter))
            if stack[0] != 0:
                yield state.set(name, Cell(value, (0, *stack[1:]), counter))
        if counter > 0:
            yield state.set(name, Cell(value, stack, 0))
            yield state.set(name, Cell(value, stack, counter - 1))


def minimize(
    program: Term, initial: State, fails: Callable[[Term, State], bool]
) -> tuple[Term, State]:
    """Greedily shrink a failing (program, state) pair to a local minimum:
    program structure first, then state values, stacks and counters.  The
    result still fails and every single further shrink step passes."""
    if not fails(program, initial):
        raise ValueError("minimize requires a failing (program, state) pair")
    changed = True
    while changed:
        changed = False
        progress = True
        while progress:
            progress = False
            for candidate in _term_shrinks(program):
                if fails(candidate, initial):
                    program = candidate
                    progress = changed = True
                    break
        progress = True
        while progress:
            progress = False
            for candidate in _state_shrinks(initial):
                if fails(program, candidate):
                    initial = candidate
                    progress = changed = True
                    break
    return program, initial


@dataclass
class CheckCounts:
    passed: int = 0
    vacuous: int = 0
    failed: int = 0

    def add(self, verdict: Verdict) -> bool:
        if isinstance(verdict, Fail):
            self.failed += 1
            return False
        if verdict.vacuous:
            self.vacuous += 1
        else:
            self.passed += 1
        return True


@dataclass(frozen=True)
class FuzzWitness:
    check: str
    program: str
    state: str
    details: str


_MAX_STORED_WITNESSES = 10
_MAX_ONLY_IF_SAMPLES = 5

_SEEDED_WITNESS_PROGRAM = Seq(Pop("x"), Push("x"))
_SEEDED_WITNESS_STATE = State({"x": Cell(5, (2,), 0)})


@dataclass
class FuzzReport:
    """Aggregated results of one randomized batch.

    The "if" correspondence direction (a broken reversible run implies an
    abort) is asserted and fails the batch; "only-if" discrepancies are
    counted and sampled but expected, starting with the always-included
    seeded witness ``POP x; PUSH x`` from ``x = (5, [2], 0)``.
    """

    seed: int
    cases: int
    strong: CheckCounts
    weak: CheckCounts
    agreement: CheckCounts
    if_direction_witnesses: int
    only_if_witnesses: int
    failures: list[FuzzWitness]
    only_if_samples: list[FuzzWitness]
    seeded_only_if_reported: bool

    @property
    def ok(self) -> bool:
        return (
            self.strong.failed == 0
            and self.weak.failed == 0
            and self.agreement.failed == 0
            and self.if_direction_witnesses == 0
        )

    def to_text(self) -> str:
        lines = [
            "fuzz report",
            f"seed: {self.seed}",
            f"cases: {self.cases}",
            f"strong-reversibility: passed {self.strong.passed}, failed {self.strong.failed}",
            f"weak-reversibility-a: passed {self.weak.passed}, vacuous {self.weak.vacuous}, "
            f"failed {self.weak.failed}",
            f"a-r-agreement: passed {self.agreement.passed}, vacuous {self.agreement.vacuous}, "
            f"failed {self.agreement.failed}",
            f"failure-correspondence: if-direction witnesses {self.if_direction_witnesses}, "
            f"only-if witnesses {self.only_if_witnesses}",
        ]
        seeded = "reported" if self.seeded_only_if_reported else "MISSING"
        lines.append(f"seeded witness 'POP x; PUSH x' from 'x = 5, [2], 0': only-if discrepancy {seeded}")
        for witness in self.failures:
            lines.append(f"FAIL [{witness.check}] program: {witness.program}")
            lines.append(f"  state: {witness.state}")
            lines.append(f"  {witness.details}")
        for witness in self.only_if_samples:
            lines.append(f"only-if sample: {witness.program} from {witness.state}")
        lines.append(f"result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        def witness_dict(w: FuzzWitness) -> dict:
            return {"check": w.check, "program": w.program, "state": w.state, "details": w.details}

        return {
            "seed": self.seed,
            "cases": self.cases,
            "strong": {"passed": self.strong.passed, "failed": self.strong.failed},
            "weak": {
                "passed": self.weak.passed,
                "vacuous": self.weak.vacuous,
                "failed": self.weak.failed,
            },
            "agreement": {
                "passed": self.agreement.passed,
                "vacuous": self.agreement.vacuous,
                "failed": self.agreement.failed,
            },
            "correspondence": {
                "if_direction_witnesses": self.if_direction_witnesses,
                "only_if_witnesses": self.only_if_witnesses,
            },
            "seeded_only_if_reported": self.seeded_only_if_reported,
            "failures": [witness_dict(w) for w in self.failures],
            "only_if_samples": [witness_dict(w) for w in self.only_if_samples],
            "ok": self.ok,
        }


def _witness(check: str, program: Term, state: State, details: str) -> FuzzWitness:
    dumped = dump_state(state, state.variables()).rstrip("\n").replace("\n", "; ")
    return FuzzWitness(check, pretty(program), dumped, details)


def run_fuzz(cfg: GenConfig, cases: int, *, minimize_failures: bool = True) -> FuzzReport:
    """Run the four randomized checks over `cases` generated pairs.

    Strong reversibility sees the raw generated states; the three checks
    defined on the pair semantics see the same states with counters zeroed.
    Failures are shrunk before reporting unless `minimize_failures` is off.
    """
    master = random.Random(cfg.seed)
    strong = CheckCounts()
    weak = CheckCounts()
    agreement = CheckCounts()
    if_witnesses = 0
    only_if = 0
    failures: list[FuzzWitness] = []
    only_if_samples: list[FuzzWitness] = []

    def record_failure(check: str, verdict: Fail, fails: Callable[[Term, State], bool]) -> None:
        program, initial = verdict.program, verdict.initial
        minimized = False
        if minimize_failures:
            try:
                program, initial = minimize(program, initial, fails)
                minimized = True
            except ValueError:
                pass
        if len(failures) < _MAX_STORED_WITNESSES:
            note = verdict.details + (" (minimized)" if minimized else "")
            failures.append(_witness(check, program, initial, note))

    for _ in range(cases):
        rng = random.Random(master.getrandbits(64))
        program = gen_term(cfg, rng=rng)
        full_state = gen_state(cfg, variables_of(program), rng=rng)
        flat_state = zero_counters(full_state)

        verdict = check_strong_reversibility(program, full_state)
        if not strong.add(verdict):
            record_failure(
                "strong-reversibility",
                verdict,
                lambda p, s: isinstance(check_strong_reversibility(p, s), Fail),
            )

        verdict = check_weak_reversibility_a(program, flat_state)
        if not weak.add(verdict):
            record_failure(
                "weak-reversibility-a",
                verdict,
                lambda p, s: isinstance(check_weak_reversibility_a(p, s), Fail),
            )

        verdict = check_agreement_a_r(program, flat_state)
        if not agreement.add(verdict):
            record_failure(
                "a-r-agreement",
                verdict,
                lambda p, s: isinstance(check_agreement_a_r(p, s), Fail),
            )

        correspondence = check_failure_correspondence(program, flat_state)
        if correspondence.direction_witness == "if":
            if_witnesses += 1
            record_failure(
                "failure-correspondence",
                Fail(program, flat_state, "reversible run ended broken without an abort"),
                lambda p, s: check_failure_correspondence(p, s).direction_witness == "if",
            )
        elif correspondence.direction_witness == "only-if":
            only_if += 1
            if len(only_if_samples) < _MAX_ONLY_IF_SAMPLES:
                only_if_samples.append(
                    _witness("failure-correspondence", program, flat_state, "abort repaired by counters")
                )

    seeded = check_failure_correspondence(_SEEDED_WITNESS_PROGRAM, _SEEDED_WITNESS_STATE)
    return FuzzReport(
        seed=cfg.seed,
        cases=cases,
        strong=strong,
        weak=weak,
        agreement=agreement,
        if_direction_witnesses=if_witnesses,
        only_if_witnesses=only_if,
        failures=failures,
        only_if_samples=only_if_samples,
        seeded_only_if_reported=seeded.direction_witness == "only-if",
    )
