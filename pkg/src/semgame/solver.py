"""Game solvers: exact fixpoint on the insertion-free fragment, budgeted
iterative deepening in general, and a brute-force enumerator used as the
test oracle.

The exact solver enumerates the reachable position graph (finite once no
construct grows the domain) and computes both players' attractor sets by
backward induction, so it can prove indeterminacy: a start position in
neither attractor means some play avoids every winning terminal forever.
The bounded solver only ever proves wins ("can this side force a win
within d moves?"), reporting everything else as unknown.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum

from .game import (
    DEFAULT_CONFIG,
    GameConfig,
    Move,
    Position,
    Role,
    Terminal,
    UnsupportedInGameError,
    Winner,
    apply_move,
    initial_position,
    key_hash,
    legal_moves,
    mover_player,
    position_key,
)
from .structure import Assignment, PartialStructure
from .syntax import (
    Formula,
    FormulaTable,
    contains_compositional_only,
    contains_insert_elem,
    index_subformulas,
)


class Outcome(Enum):
    VERIFIED = "verified"
    FALSIFIED = "falsified"
    INDETERMINATE = "indeterminate"
    UNKNOWN = "unknown"


class ContainsInsertError(Exception):
    """The exact solver was handed a formula with element insertion; the
    reachable position space may be infinite, use solve_bounded."""


class NoWitnessError(Exception):
    """Only verified/falsified verdicts carry a winning-play trace."""


@dataclass(frozen=True)
class TraceStep:
    pre: str
    move: Move
    post: str


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]
    terminal: Winner


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    depth: int | None
    budget_used: int
    trace: Trace | None = None


def extract_trace(v: Verdict) -> Trace:
    """Winning-play witness of a conclusive verdict (replayable through
    apply_move; the winner follows the computed strategy)."""
    if v.trace is None:
        raise NoWitnessError(f"no winning play for outcome {v.outcome.value}")
    return v.trace


def _win_of(player: Role) -> Winner:
    return Winner.ELOISE_WINS if player is Role.ELOISE else Winner.ABELARD_WINS


@dataclass
class _Rec:
    position: Position
    terminal: Terminal | None
    succs: list[tuple[Move, tuple]]  # (move, successor key), source order
    mover: Role | None               # None for forced steps


class _Graph:
    """Lazily expanded reachable-position graph keyed by canonical identity."""

    def __init__(self, table: FormulaTable, config: GameConfig):
        self.table = table
        self.config = config
        self.recs: dict[tuple, _Rec] = {}
        self.positions: dict[tuple, Position] = {}

    def intern(self, p: Position) -> tuple:
        key = position_key(p, self.table)
        self.positions.setdefault(key, p)
        return key

    def expand(self, key: tuple) -> _Rec:
        rec = self.recs.get(key)
        if rec is not None:
            return rec
        p = self.positions[key]
        moves = legal_moves(p, self.table, self.config)
        if isinstance(moves, Terminal):
            rec = _Rec(p, moves, [], None)
        else:
            succs = []
            for m in moves:
                child = apply_move(p, m, self.table, self.config)
                succs.append((m, self.intern(child)))
            rec = _Rec(p, None, succs, mover_player(moves, p.verifier))
        self.recs[key] = rec
        return rec


def _check_game_formula(formula: Formula):
    if contains_compositional_only(formula):
        raise UnsupportedInGameError("wnot/det have no game rules; use the compositional evaluator")


# ---------------------------------------------------------------------------
# Exact solver

def solve_exact(s: PartialStructure, g: Assignment, formula: Formula,
                config: GameConfig = DEFAULT_CONFIG) -> Verdict:
    """Classify the game by exhausting its (finite) position graph.

    Requires an insertion-free formula so the domain never grows.  Both
    players' attractors are computed by backward fixpoint; a start
    position in neither attractor is a proven indeterminate: play can
    dodge every winning terminal forever.
    """
    _check_game_formula(formula)
    if contains_insert_elem(formula):
        raise ContainsInsertError("formula inserts elements; use solve_bounded")
    table = index_subformulas(formula)
    graph = _Graph(table, config)
    init = graph.intern(initial_position(s, g, table))

    frontier = deque([init])
    seen = {init}
    while frontier:
        key = frontier.popleft()
        rec = graph.expand(key)
        for _, child in rec.succs:
            if child not in seen:
                seen.add(child)
                frontier.append(child)

    explored = len(seen)
    for player, outcome in ((Role.ELOISE, Outcome.VERIFIED), (Role.ABELARD, Outcome.FALSIFIED)):
        rank = _attractor(graph, player)
        if init in rank:
            trace = _trace_from_ranks(graph, init, rank)
            return Verdict(outcome, rank[init], explored, trace)
    return Verdict(Outcome.INDETERMINATE, None, explored, None)


def _attractor(graph: _Graph, player: Role) -> dict[tuple, int]:
    """Positions from which ``player`` forces a win, with distance ranks."""
    target = _win_of(player)
    preds: dict[tuple, list[tuple]] = defaultdict(list)
    counts: dict[tuple, int] = {}
    for key, rec in graph.recs.items():
        succ_keys = {sk for _, sk in rec.succs}
        if rec.mover is not player:
            counts[key] = len(succ_keys)
        for sk in succ_keys:
            preds[sk].append(key)

    rank: dict[tuple, int] = {}
    q: deque[tuple] = deque()
    for key, rec in graph.recs.items():
        if rec.terminal is not None and rec.terminal.winner is target:
            rank[key] = 0
            q.append(key)

    while q:
        key = q.popleft()
        r = rank[key]
        for pred in preds[key]:
            if pred in rank:
                continue
            if graph.recs[pred].mover is player:
                rank[pred] = r + 1
                q.append(pred)
            else:
                counts[pred] -= 1
                if counts[pred] == 0:
                    rank[pred] = r + 1
                    q.append(pred)
    return rank


def _trace_from_ranks(graph: _Graph, init: tuple, rank: dict[tuple, int]) -> Trace:
    steps = []
    key = init
    while graph.recs[key].terminal is None:
        rec = graph.recs[key]
        for move, sk in rec.succs:
            if sk in rank and rank[sk] < rank[key]:
                steps.append(TraceStep(key_hash(key), move, key_hash(sk)))
                key = sk
                break
        else:
            raise AssertionError("attractor rank without descending move")
    return Trace(tuple(steps), graph.recs[key].terminal.winner)


# ---------------------------------------------------------------------------
# Bounded solver

_E, _A, _U = "E", "A", "U"


class _Bounded:
    """Depth-limited AND-OR search with a per-iteration transposition table."""

    def __init__(self, table: FormulaTable, config: GameConfig):
        self.graph = _Graph(table, config)
        self.memo: dict[tuple[tuple, int], str] = {}

    def new_iteration(self):
        self.memo = {}

    def value(self, key: tuple, r: int) -> str:
        rec = self.graph.expand(key)
        if rec.terminal is not None:
            w = rec.terminal.winner
            if w is Winner.ELOISE_WINS:
                return _E
            if w is Winner.ABELARD_WINS:
                return _A
            return _U
        if r == 0:
            return _U
        mk = (key, r)
        hit = self.memo.get(mk)
        if hit is not None:
            return hit
        if rec.mover is None:
            res = self.value(rec.succs[0][1], r - 1)
        else:
            want = _E if rec.mover is Role.ELOISE else _A
            dual = _A if want == _E else _E
            res = dual  # stays only if every successor is a win for the opponent
            for _, sk in rec.succs:
                v = self.value(sk, r - 1)
                if v == want:
                    res = want
                    break
                if v != dual:
                    res = _U
        self.memo[mk] = res
        return res

    def winning_trace(self, init: tuple, limit: int, winner: str) -> Trace:
        steps = []
        key, r = init, limit
        while self.graph.recs[key].terminal is None:
            rec = self.graph.recs[key]
            for move, sk in rec.succs:
                if self.value(sk, r - 1) == winner:
                    steps.append(TraceStep(key_hash(key), move, key_hash(sk)))
                    key, r = sk, r - 1
                    break
            else:
                raise AssertionError("winning value without winning move")
        return Trace(tuple(steps), self.graph.recs[key].terminal.winner)


def solve_bounded(s: PartialStructure, g: Assignment, formula: Formula, budget: int,
                  config: GameConfig = DEFAULT_CONFIG) -> Verdict:
    """Iterative-deepening semi-decision: search for a forced win within
    1, 2, ... up to ``budget`` moves (forced steps count too).

    Sound for verified/falsified: a reported win is a real strategy.
    Anything not settled within the budget is unknown; raising the budget
    eventually finds every finite forced win.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    table = index_subformulas(formula)
    return solve_bounded_position(initial_position(s, g, table), table, budget, config)


def solve_bounded_position(p: Position, table: FormulaTable, budget: int,
                           config: GameConfig = DEFAULT_CONFIG) -> Verdict:
    """solve_bounded starting from an arbitrary mid-game position."""
    _check_game_formula(table.root)
    search = _Bounded(table, config)
    init = search.graph.intern(p)
    for limit in range(0, budget + 1):
        search.new_iteration()
        val = search.value(init, limit)
        if val == _E:
            return Verdict(Outcome.VERIFIED, limit, limit, search.winning_trace(init, limit, _E))
        if val == _A:
            return Verdict(Outcome.FALSIFIED, limit, limit, search.winning_trace(init, limit, _A))
    return Verdict(Outcome.UNKNOWN, None, budget, None)


def solve_auto(s: PartialStructure, g: Assignment, formula: Formula, budget: int,
               config: GameConfig = DEFAULT_CONFIG) -> tuple[Verdict, str]:
    """Exact solver when the formula is insertion-free, bounded otherwise."""
    if contains_insert_elem(formula):
        return solve_bounded(s, g, formula, budget, config), "bounded"
    return solve_exact(s, g, formula, config), "exact"


# ---------------------------------------------------------------------------
# Brute-force oracle

class BruteOutcome(Enum):
    ELOISE_WINS = "eloise"
    ABELARD_WINS = "abelard"
    NEITHER_YET = "neither-yet"


def brute_force_enumerate(p: Position, depth: int, table: FormulaTable,
                          config: GameConfig = DEFAULT_CONFIG) -> BruteOutcome:
    """Forced-win-within-depth by full game-tree expansion.

    Deliberately has no memoization, no transposition table and no
    deepening: it recomputes shared subtrees from scratch, which makes it
    an independent check on the real solvers at small depths.
    """
    moves = legal_moves(p, table, config)
    if isinstance(moves, Terminal):
        if moves.winner is Winner.ELOISE_WINS:
            return BruteOutcome.ELOISE_WINS
        if moves.winner is Winner.ABELARD_WINS:
            return BruteOutcome.ABELARD_WINS
        return BruteOutcome.NEITHER_YET
    if depth == 0:
        return BruteOutcome.NEITHER_YET
    mover = mover_player(moves, p.verifier)
    results = [brute_force_enumerate(apply_move(p, m, table, config), depth - 1, table, config)
               for m in moves]
    if mover is None:
        return results[0]
    want = BruteOutcome.ELOISE_WINS if mover is Role.ELOISE else BruteOutcome.ABELARD_WINS
    dual = BruteOutcome.ABELARD_WINS if mover is Role.ELOISE else BruteOutcome.ELOISE_WINS
    if any(r is want for r in results):
        return want
    if all(r is dual for r in results):
        return dual
    return BruteOutcome.NEITHER_YET


# ---------------------------------------------------------------------------
# Move selection for the interactive layers

def best_move_index(p: Position, table: FormulaTable, budget: int,
                    config: GameConfig = DEFAULT_CONFIG) -> tuple[int, str]:
    """Index of the move the engine should play, with the basis for it.

    Prefers the first move that forces a win for the side on turn within
    the budget ("winning"), then the first whose successor is not a proven
    loss ("safe"), then the first move outright ("first").  Ties break by
    source order so engine play is deterministic.
    """
    budget = max(1, budget)
    moves = legal_moves(p, table, config)
    if isinstance(moves, Terminal):
        raise ValueError("no moves at a terminal position")
    mover = mover_player(moves, p.verifier)
    if mover is None:
        return 0, "forced"
    want = _E if mover is Role.ELOISE else _A
    lose = _A if want == _E else _E
    search = _Bounded(table, config)
    succ_keys = [search.graph.intern(apply_move(p, m, table, config)) for m in moves]
    for limit in range(0, budget):
        search.new_iteration()
        for i, sk in enumerate(succ_keys):
            if search.value(sk, limit) == want:
                return i, "winning"
    for i, sk in enumerate(succ_keys):
        if search.value(sk, budget - 1) != lose:
            return i, "safe"
    return 0, "first"
