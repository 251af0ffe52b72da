"""Deterministic Turing machine simulator and the machine/formula
correspondence rig.

The simulator runs on a one-sided infinite tape and reports one of four
outcomes: accept, reject, a detected configuration cycle (a sound proof of
divergence: the exact machine state, head position, and used tape came
around again), or still-running at budget exhaustion.  The correspondence
checker feeds a structure's string encoding to a machine and compares the
result against the game solver on the same structure: accept should line
up with verified, reject with falsified, and a cycling machine with a
proven-indeterminate game.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .game import DEFAULT_CONFIG, GameConfig
from .solver import Outcome, solve_auto
from .structure import PartialStructure, encode_model
from .syntax import Formula


class TMError(Exception):
    pass


@dataclass(frozen=True)
class TuringMachine:
    states: frozenset[str]
    input_alphabet: frozenset[str]
    tape_alphabet: frozenset[str]
    transitions: dict  # (state, symbol) -> (state, symbol, "L"|"R")
    start: str
    accept: str
    reject: str
    blank: str = "_"

    def __post_init__(self):
        if self.accept == self.reject:
            raise TMError("accept and reject states must differ")
        for st in (self.start, self.accept, self.reject):
            if st not in self.states:
                raise TMError(f"state {st!r} not declared")
        if self.blank not in self.tape_alphabet:
            raise TMError("blank symbol must be in the tape alphabet")
        if not self.input_alphabet <= self.tape_alphabet:
            raise TMError("input alphabet must be contained in the tape alphabet")
        for (q, a), (q2, b, d) in self.transitions.items():
            if q in (self.accept, self.reject):
                raise TMError(f"no transitions allowed from halting state {q!r}")
            if q not in self.states or q2 not in self.states:
                raise TMError(f"transition uses undeclared state: {(q, q2)}")
            if a not in self.tape_alphabet or b not in self.tape_alphabet:
                raise TMError(f"transition uses undeclared symbol: {(a, b)}")
            if d not in ("L", "R"):
                raise TMError(f"bad direction {d!r}")


class TMOutcomeKind(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    RUNNING = "running"
    CYCLE = "cycle"


@dataclass(frozen=True)
class TMOutcome:
    kind: TMOutcomeKind
    steps: int

    @property
    def conclusive(self) -> bool:
        return self.kind is not TMOutcomeKind.RUNNING


def run_tm(tm: TuringMachine, input_str: str, step_budget: int) -> TMOutcome:
    """Simulate up to ``step_budget`` steps.

    A move left at cell 0 stays put; a missing transition halts in the
    reject state.  Every full configuration (state, head, used tape) is
    remembered, so an exact repeat is reported as a cycle: a deterministic
    machine that revisits a configuration loops forever.
    """
    for ch in input_str:
        if ch not in tm.input_alphabet:
            raise TMError(f"input symbol {ch!r} not in the input alphabet")
    tape = dict(enumerate(input_str))
    state = tm.start
    head = 0
    steps = 0

    def config():
        used = tuple(sorted((i, c) for i, c in tape.items() if c != tm.blank))
        return (state, head, used)

    seen = {config()}
    while True:
        if state == tm.accept:
            return TMOutcome(TMOutcomeKind.ACCEPT, steps)
        if state == tm.reject:
            return TMOutcome(TMOutcomeKind.REJECT, steps)
        if steps >= step_budget:
            return TMOutcome(TMOutcomeKind.RUNNING, steps)
        sym = tape.get(head, tm.blank)
        delta = tm.transitions.get((state, sym))
        if delta is None:
            state = tm.reject
            steps += 1
            continue
        state, write, direction = delta
        tape[head] = write
        head = head + 1 if direction == "R" else max(0, head - 1)
        steps += 1
        c = config()
        if c in seen:
            return TMOutcome(TMOutcomeKind.CYCLE, steps)
        seen.add(c)


# ---------------------------------------------------------------------------
# Machine file format

_DELTA_RE = re.compile(
    r"\(\s*(\S+?)\s*,\s*(\S)\s*\)\s*->\s*\(\s*(\S+?)\s*,\s*(\S)\s*,\s*([LR])\s*\)")


def parse_machine(text: str) -> TuringMachine:
    """Parse the line-based machine format.

    ::

        states: q0 q1 qa qr
        start: q0
        accept: qa
        reject: qr
        blank: _           # optional, default '_'
        input: a b c       # optional, default: inferred from deltas
        delta: (q0,a) -> (q1,b,R)
    """
    states: list[str] = []
    start = accept = reject = None
    blank = "_"
    input_syms: list[str] | None = None
    transitions = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("states:"):
            states = line[len("states:"):].split()
        elif line.startswith("start:"):
            start = line[len("start:"):].strip()
        elif line.startswith("accept:"):
            accept = line[len("accept:"):].strip()
        elif line.startswith("reject:"):
            reject = line[len("reject:"):].strip()
        elif line.startswith("blank:"):
            blank = line[len("blank:"):].strip()
        elif line.startswith("input:"):
            input_syms = line[len("input:"):].split()
        elif line.startswith("delta:"):
            m = _DELTA_RE.fullmatch(line[len("delta:"):].strip())
            if not m:
                raise TMError(f"line {lineno}: cannot parse transition {line!r}")
            key = (m.group(1), m.group(2))
            if key in transitions:
                raise TMError(f"line {lineno}: duplicate transition for {key}")
            transitions[key] = (m.group(3), m.group(4), m.group(5))
        else:
            raise TMError(f"line {lineno}: cannot parse {line!r}")
    if not states or start is None or accept is None or reject is None:
        raise TMError("machine file needs states:, start:, accept:, and reject: lines")
    tape = {blank} | {a for _, a in transitions} | {b for _, b, _ in transitions.values()}
    if input_syms is None:
        input_syms = sorted(tape - {blank})
    tape |= set(input_syms)
    return TuringMachine(
        states=frozenset(states),
        input_alphabet=frozenset(input_syms),
        tape_alphabet=frozenset(tape),
        transitions=transitions,
        start=start,
        accept=accept,
        reject=reject,
        blank=blank,
    )


# ---------------------------------------------------------------------------
# Correspondence checking

_AGREEMENT = {
    (TMOutcomeKind.ACCEPT, Outcome.VERIFIED),
    (TMOutcomeKind.REJECT, Outcome.FALSIFIED),
    (TMOutcomeKind.CYCLE, Outcome.INDETERMINATE),
}


@dataclass(frozen=True)
class CorrespondenceRow:
    encoding: str
    machine: TMOutcome
    verdict_outcome: Outcome
    solver: str
    status: str  # "agree" | "disagree" | "inconclusive"


@dataclass(frozen=True)
class CorrespondenceReport:
    rows: tuple[CorrespondenceRow, ...]

    @property
    def conclusive_agreements(self) -> int:
        return sum(1 for r in self.rows if r.status == "agree")

    @property
    def disagreements(self) -> int:
        return sum(1 for r in self.rows if r.status == "disagree")


def check_correspondence(tm: TuringMachine, formula: Formula,
                         models: list[PartialStructure], budget: int,
                         config: GameConfig = DEFAULT_CONFIG) -> CorrespondenceReport:
    """Run machine and solver side by side over each model.

    A row is conclusive only when both sides are: the machine halted or
    provably cycles, and the solver proved a verdict.  Budget exhaustion on
    either side makes the row inconclusive; it is never counted as
    agreement.
    """
    rows = []
    for model in models:
        enc = encode_model(model)
        tm_out = run_tm(tm, enc, budget)
        verdict, solver = solve_auto(model, {}, formula, budget, config)
        solver_conclusive = verdict.outcome is not Outcome.UNKNOWN
        if tm_out.conclusive and solver_conclusive:
            ok = (tm_out.kind, verdict.outcome) in _AGREEMENT
            status = "agree" if ok else "disagree"
        else:
            status = "inconclusive"
        rows.append(CorrespondenceRow(enc, tm_out, verdict.outcome, solver, status))
    return CorrespondenceReport(tuple(rows))


# ---------------------------------------------------------------------------
# Curated machine/formula pairs
#
# Each pair hardcodes the encoding layout for a vocabulary with a single
# unary relation R: "n=<k>;R:1:<one status char per element>;".

@dataclass(frozen=True)
class CuratedPair:
    name: str
    machine: TuringMachine
    formula_text: str
    rationale: str


_DIGITS = "0123456789"


def _empty_domain_machine() -> TuringMachine:
    # Accept exactly the encodings that start "n=0;".
    t = {("q0", "n"): ("q1", "n", "R"),
         ("q1", "="): ("q2", "=", "R"),
         ("q2", "0"): ("q3", "0", "R"),
         ("q3", ";"): ("qa", ";", "R")}
    for d in _DIGITS[1:]:
        t[("q2", d)] = ("qr", d, "R")
    for d in _DIGITS:
        t[("q3", d)] = ("qr", d, "R")
    return TuringMachine(
        states=frozenset({"q0", "q1", "q2", "q3", "qa", "qr"}),
        input_alphabet=frozenset("n=;:+-?R" + _DIGITS),
        tape_alphabet=frozenset("n=;:+-?R_" + _DIGITS),
        transitions=t, start="q0", accept="qa", reject="qr")


def _reject_all_machine() -> TuringMachine:
    t = {("q0", "n"): ("qr", "n", "R")}
    return TuringMachine(
        states=frozenset({"q0", "qa", "qr"}),
        input_alphabet=frozenset("n=;:+-?R" + _DIGITS),
        tape_alphabet=frozenset("n=;:+-?R_" + _DIGITS),
        transitions=t, start="q0", accept="qa", reject="qr")


def _always_cycle_machine() -> TuringMachine:
    # Every encoding starts "n="; shuttle between the first two cells forever.
    t = {("q0", "n"): ("q1", "n", "R"),
         ("q1", "="): ("q0", "=", "L")}
    return TuringMachine(
        states=frozenset({"q0", "q1", "qa", "qr"}),
        input_alphabet=frozenset("n=;:+-?R" + _DIGITS),
        tape_alphabet=frozenset("n=;:+-?R_" + _DIGITS),
        transitions=t, start="q0", accept="qa", reject="qr")


def _some_positive_machine() -> TuringMachine:
    # Scan the R:1: payload of "n=<k>;R:1:<payload>;".  Accept on the first
    # '+'; reject at end of an all '-' payload; shuttle forever (a provable
    # cycle) if a '?' turned up but no '+': the relation leaves membership
    # open, so neither acceptance nor rejection would be sound.
    t = {("q0", "n"): ("q1", "n", "R"),
         ("q1", "="): ("q2", "=", "R"),
         ("q2", ";"): ("q3", ";", "R"),
         ("q3", "R"): ("q4", "R", "R"),
         ("q4", ":"): ("q5", ":", "R"),
         ("q5", "1"): ("q6", "1", "R"),
         ("q6", ":"): ("scan", ":", "R"),
         ("scan", "+"): ("qa", "+", "R"),
         ("scan", "-"): ("scan", "-", "R"),
         ("scan", "?"): ("scanq", "?", "R"),
         ("scan", ";"): ("qr", ";", "R"),
         ("scanq", "+"): ("qa", "+", "R"),
         ("scanq", "-"): ("scanq", "-", "R"),
         ("scanq", "?"): ("scanq", "?", "R"),
         ("scanq", ";"): ("loopa", ";", "R"),
         ("loopa", "_"): ("loopb", "_", "L"),
         ("loopb", ";"): ("loopa", ";", "R")}
    for d in _DIGITS:
        t[("q2", d)] = ("q2", d, "R")
    return TuringMachine(
        states=frozenset({"q0", "q1", "q2", "q3", "q4", "q5", "q6",
                          "scan", "scanq", "loopa", "loopb", "qa", "qr"}),
        input_alphabet=frozenset("n=;:+-?R" + _DIGITS),
        tape_alphabet=frozenset("n=;:+-?R_" + _DIGITS),
        transitions=t, start="q0", accept="qa", reject="qr")


def curated_pairs() -> list[CuratedPair]:
    """Hand-built machine/formula pairs over the single-unary-relation
    vocabulary, each engineered to land on the same side of the
    accept/reject/diverge split as the game for its formula."""
    return [
        CuratedPair(
            "empty-domain",
            _empty_domain_machine(),
            "not exists x. x = x",
            "The machine accepts exactly the encodings 'n=0;...'. The game on "
            "'not exists x. x = x' swaps roles once; with an empty domain the "
            "witness choice is impossible for the role-swapped verifier, so "
            "Eloise wins exactly on empty domains and loses on the rest."),
        CuratedPair(
            "reject-everything",
            _reject_all_machine(),
            "exists x. not x = x",
            "The machine rejects every encoding in one step. No witness ever "
            "makes 'not x = x' verifiable (equality on a chosen element always "
            "holds), and on the empty domain the witness pick fails, so the game "
            "is falsified on every model."),
        CuratedPair(
            "truth-teller-diverges",
            _always_cycle_machine(),
            "claim C0. C0",
            "The machine shuttles over the first two tape cells, repeating a "
            "configuration after two steps on any input. The self-referential "
            "claim loops through its binder forever, so no play ever reaches an "
            "atom: machine divergence pairs with the proven-indeterminate game."),
        CuratedPair(
            "some-positive",
            _some_positive_machine(),
            "exists x. R(x)",
            "The machine scans R's status payload: '+' anywhere means accept, an "
            "all '-' payload means reject, and a '?' with no '+' sends it into a "
            "two-cell shuttle (a provable cycle). That mirrors the game: Eloise "
            "wins by picking a positive element, Abelard wins when every element "
            "is negative (or the domain is empty), and an undefined tuple leaves "
            "the play with no winner."),
    ]
