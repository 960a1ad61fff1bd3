"""Workbench for score, a small reversible imperative language.

score programs manipulate integer variables that carry a history stack and
a repair counter.  The package provides the abstract syntax and structural
inverter, a parser and pretty-printer, three big-step evaluators (naive,
assert-based, total reversible), and a property-testing harness that
checks the reversibility guarantees by exhaustive enumeration and random
generation.
"""

from .harness import (
    CheckCounts,
    Fail,
    FailureCorrespondence,
    FuzzReport,
    FuzzWitness,
    GenConfig,
    Pass,
    Verdict,
    check_agreement_a_r,
    check_failure_correspondence,
    check_strong_reversibility,
    check_weak_reversibility_a,
    exhaustive_pop_injective,
    exhaustive_pop_push_inverse,
    gen_state,
    gen_term,
    minimize,
    run_fuzz,
    zero_counters,
)
from .parser import ParseError, parse
from .semantics import (
    AbortRecord,
    Aborted,
    EvalError,
    Final,
    IllFormedProgramError,
    NonzeroCounterError,
    RunOutcome,
    TraceStep,
    eval_a,
    eval_n,
    eval_r,
    eval_traced,
    pop_r,
    push_r,
)
from .state import (
    Cell,
    DEFAULT_CELL,
    State,
    dump_state,
    hd,
    parse_state,
    parse_state_declarations,
    tl,
)
from .syntax import (
    Dec,
    For,
    Identifier,
    Inc,
    Pop,
    Push,
    Seq,
    Skip,
    Term,
    Violation,
    check_well_formed,
    invert,
    is_identifier,
    pretty,
    variables_of,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # syntax
    "Term",
    "Skip",
    "Inc",
    "Dec",
    "Push",
    "Pop",
    "Seq",
    "For",
    "Identifier",
    "Violation",
    "invert",
    "check_well_formed",
    "variables_of",
    "pretty",
    "is_identifier",
    # parser
    "parse",
    "ParseError",
    # state
    "Cell",
    "DEFAULT_CELL",
    "State",
    "hd",
    "tl",
    "parse_state",
    "parse_state_declarations",
    "dump_state",
    # semantics
    "push_r",
    "pop_r",
    "eval_n",
    "eval_a",
    "eval_r",
    "eval_traced",
    "Final",
    "Aborted",
    "RunOutcome",
    "AbortRecord",
    "TraceStep",
    "EvalError",
    "IllFormedProgramError",
    "NonzeroCounterError",
    # harness
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
    "zero_counters",
    "check_strong_reversibility",
    "check_weak_reversibility_a",
    "check_agreement_a_r",
    "check_failure_correspondence",
    "exhaustive_pop_push_inverse",
    "exhaustive_pop_injective",
    "minimize",
    "run_fuzz",
]
