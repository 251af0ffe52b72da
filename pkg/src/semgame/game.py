"""Positions and the move/transition relation of the evaluation game.

A position is (structure, assignment, formula node, verifier flag).  Two
players, Eloise and Abelard, move through the formula: Eloise starts as
the verifier, negation swaps the roles, the verifier resolves
disjunctions, existentials, tuple mutations and claim back-references,
the falsifier resolves conjunctions and universals, and the remaining
constructs step deterministically.  Plays end at first-order atoms (or at
dead ends); a play that ends nowhere is won by neither player.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from enum import Enum

from .structure import (
    Assignment,
    PartialStructure,
    RelStatus,
    delete_element,
    delete_tuple,
    eval_term,
    insert_element,
    insert_tuple,
)
from .syntax import (
    And,
    Claim,
    ClaimAtom,
    DeleteElem,
    DeleteTuple,
    EqAtom,
    Exists,
    Forall,
    FormulaTable,
    InsertElem,
    InsertTuple,
    Not,
    Or,
    RelAtom,
    COMPOSITIONAL_ONLY,
)


class Role(Enum):
    ELOISE = "eloise"
    ABELARD = "abelard"

    def other(self) -> "Role":
        return Role.ABELARD if self is Role.ELOISE else Role.ELOISE


class Winner(Enum):
    ELOISE_WINS = "eloise"
    ABELARD_WINS = "abelard"
    NEITHER = "neither"


def _wins(player: Role) -> Winner:
    return Winner.ELOISE_WINS if player is Role.ELOISE else Winner.ABELARD_WINS


@dataclass(frozen=True)
class Terminal:
    winner: Winner


class Mover(Enum):
    VERIFIER = "verifier"
    FALSIFIER = "falsifier"
    FORCED = "forced"


@dataclass(frozen=True)
class Move:
    mover: Mover


@dataclass(frozen=True)
class PickDisjunct(Move):
    branch: str  # "left" | "right"


@dataclass(frozen=True)
class PickWitness(Move):
    var: str
    element: str


@dataclass(frozen=True)
class PickTuple(Move):
    vars: tuple[str, ...]
    elements: tuple[str, ...]


@dataclass(frozen=True)
class PickClaimBinder(Move):
    binder: int  # target node id


@dataclass(frozen=True)
class Descend(Move):
    pass


class IllegalMoveError(Exception):
    pass


class UnsupportedInGameError(Exception):
    """wnot/det reached during game play; no game rule exists for them."""


# Conventions for the deliberately underdetermined corner cases.
DELETE_MISS_LOSE = "lose"      # deleting through an unbound variable loses
DELETE_MISS_IGNORE = "ignore"  # ... or is silently skipped
CLAIM_UNBOUND_NEITHER = "neither"  # claim atom without binder ends the play for neither
CLAIM_UNBOUND_LOSE = "lose"        # ... or loses for the verifier


@dataclass(frozen=True)
class GameConfig:
    delete_miss: str = DELETE_MISS_LOSE
    claim_unbound: str = CLAIM_UNBOUND_NEITHER
    fresh_negative: bool = False


DEFAULT_CONFIG = GameConfig()


@dataclass(frozen=True, eq=False)
class Position:
    structure: PartialStructure
    assignment: Assignment
    node: int
    verifier: Role = Role.ELOISE


def initial_position(s: PartialStructure, g: Assignment, table: FormulaTable) -> Position:
    if not table.nodes:
        raise ValueError("empty formula table")
    for v in g.values():
        if v not in s.domain:
            raise ValueError(f"assignment maps to {v!r}, not a domain element")
    return Position(s, dict(g), 0, Role.ELOISE)


def position_key(p: Position, table: FormulaTable) -> tuple:
    """Canonical identity of a position, for hashing and transposition.

    For claim-free formulas the assignment is restricted to the free
    variables of the current node (bindings no subsequent move can read
    are dropped); with claims in play a back-reference may jump to a node
    with different free variables, so the full assignment is kept.
    """
    if table.claim_free:
        fv = table.node(p.node).free_vars
        items = tuple(sorted((v, e) for v, e in p.assignment.items() if v in fv))
    else:
        items = tuple(sorted(p.assignment.items()))
    return (p.structure.canonical_key, items, p.node, p.verifier.value)


def key_hash(key: tuple) -> str:
    return hashlib.sha256(repr(key).encode()).hexdigest()[:16]


def position_hash(p: Position, table: FormulaTable) -> str:
    return key_hash(position_key(p, table))


def adjudicate_atom(p: Position, table: FormulaTable) -> Terminal:
    """Decide a play that reached a relational or equality atom.

    The player currently holding the verifier role wins on a defined,
    positively-holding atom; the other side wins on a defined, negatively-
    holding one; any undefined term or unspecified tuple ends the play
    with no winner.
    """
    f = table.node(p.node).formula
    s, g = p.structure, p.assignment
    if isinstance(f, RelAtom):
        vals = [eval_term(s, g, t) for t in f.terms]
        if any(v is None for v in vals):
            return Terminal(Winner.NEITHER)
        status = s.rel_status(f.rel, tuple(vals))
        if status is RelStatus.POSITIVE:
            return Terminal(_wins(p.verifier))
        if status is RelStatus.NEGATIVE:
            return Terminal(_wins(p.verifier.other()))
        return Terminal(Winner.NEITHER)
    if isinstance(f, EqAtom):
        a = eval_term(s, g, f.left)
        b = eval_term(s, g, f.right)
        if a is None or b is None:
            return Terminal(Winner.NEITHER)
        return Terminal(_wins(p.verifier if a == b else p.verifier.other()))
    raise ValueError(f"not an atom node: {type(f).__name__}")


def legal_moves(p: Position, table: FormulaTable,
                config: GameConfig = DEFAULT_CONFIG) -> list[Move] | Terminal:
    """All moves available at ``p`` in deterministic source order, or the
    Terminal that ends the play right here."""
    f = table.node(p.node).formula
    domain = p.structure.domain
    if isinstance(f, And):
        return [PickDisjunct(Mover.FALSIFIER, "left"), PickDisjunct(Mover.FALSIFIER, "right")]
    if isinstance(f, Or):
        return [PickDisjunct(Mover.VERIFIER, "left"), PickDisjunct(Mover.VERIFIER, "right")]
    if isinstance(f, Exists):
        if not domain:
            return Terminal(_wins(p.verifier.other()))  # verifier cannot move
        return [PickWitness(Mover.VERIFIER, f.var, a) for a in domain]
    if isinstance(f, Forall):
        if not domain:
            return Terminal(_wins(p.verifier))  # falsifier cannot move
        return [PickWitness(Mover.FALSIFIER, f.var, a) for a in domain]
    if isinstance(f, Not):
        return [Descend(Mover.FORCED)]
    if isinstance(f, InsertElem):
        return [Descend(Mover.FORCED)]
    if isinstance(f, DeleteElem):
        if f.var in p.assignment or config.delete_miss == DELETE_MISS_IGNORE:
            return [Descend(Mover.FORCED)]
        return Terminal(_wins(p.verifier.other()))
    if isinstance(f, (InsertTuple, DeleteTuple)):
        if not domain:
            return Terminal(_wins(p.verifier.other()))
        return [PickTuple(Mover.VERIFIER, f.vars, tup)
                for tup in itertools.product(domain, repeat=len(f.vars))]
    if isinstance(f, Claim):
        return [Descend(Mover.FORCED)]
    if isinstance(f, ClaimAtom):
        binders = table.binders_for(f.index)
        if binders:
            return [PickClaimBinder(Mover.VERIFIER, b) for b in binders]
        if config.claim_unbound == CLAIM_UNBOUND_LOSE:
            return Terminal(_wins(p.verifier.other()))
        return Terminal(Winner.NEITHER)
    if isinstance(f, (RelAtom, EqAtom)):
        return adjudicate_atom(p, table)
    if isinstance(f, COMPOSITIONAL_ONLY):
        raise UnsupportedInGameError(
            f"{type(f).__name__} reached during game play; it has no game rule")
    raise ValueError(f"unhandled node {type(f).__name__}")


def apply_move(p: Position, m: Move, table: FormulaTable,
               config: GameConfig = DEFAULT_CONFIG) -> Position:
    """Successor position after ``m``; raises IllegalMoveError on mismatch."""
    info = table.node(p.node)
    f = info.formula

    def bad(why: str):
        raise IllegalMoveError(f"{type(m).__name__} at {type(f).__name__} node: {why}")

    if isinstance(f, (And, Or)):
        if not isinstance(m, PickDisjunct) or m.branch not in ("left", "right"):
            bad("expected a left/right choice")
        child = info.children[0] if m.branch == "left" else info.children[1]
        return Position(p.structure, p.assignment, child, p.verifier)

    if isinstance(f, (Exists, Forall)):
        if not isinstance(m, PickWitness) or m.var != f.var:
            bad("expected a witness for the bound variable")
        if m.element not in p.structure.domain:
            bad(f"{m.element!r} is not a domain element")
        g = {**p.assignment, f.var: m.element}
        return Position(p.structure, g, info.children[0], p.verifier)

    if isinstance(f, Not):
        if not isinstance(m, Descend):
            bad("negation steps deterministically")
        return Position(p.structure, p.assignment, info.children[0], p.verifier.other())

    if isinstance(f, InsertElem):
        if not isinstance(m, Descend):
            bad("insertion steps deterministically")
        s, fresh = insert_element(p.structure, config.fresh_negative)
        g = {**p.assignment, f.var: fresh}
        return Position(s, g, info.children[0], p.verifier)

    if isinstance(f, DeleteElem):
        if not isinstance(m, Descend):
            bad("deletion steps deterministically")
        if f.var not in p.assignment:
            if config.delete_miss != DELETE_MISS_IGNORE:
                bad(f"variable {f.var!r} is unbound")
            return Position(p.structure, p.assignment, info.children[0], p.verifier)
        gone = p.assignment[f.var]
        s = delete_element(p.structure, gone)
        g = {v: e for v, e in p.assignment.items() if e != gone}
        return Position(s, g, info.children[0], p.verifier)

    if isinstance(f, (InsertTuple, DeleteTuple)):
        if not isinstance(m, PickTuple) or m.vars != f.vars:
            bad("expected a tuple choice for the bound variables")
        if len(m.elements) != len(f.vars):
            bad("tuple length mismatch")
        for e in m.elements:
            if e not in p.structure.domain:
                bad(f"{e!r} is not a domain element")
        g = dict(p.assignment)
        for v, e in zip(f.vars, m.elements):
            g[v] = e
        if isinstance(f, InsertTuple):
            s = insert_tuple(p.structure, f.rel, tuple(m.elements))
        else:
            s = delete_tuple(p.structure, f.rel, tuple(m.elements))
        return Position(s, g, info.children[0], p.verifier)

    if isinstance(f, Claim):
        if not isinstance(m, Descend):
            bad("claim binder steps deterministically")
        return Position(p.structure, p.assignment, info.children[0], p.verifier)

    if isinstance(f, ClaimAtom):
        if not isinstance(m, PickClaimBinder):
            bad("expected a claim binder choice")
        if m.binder not in table.binders_for(f.index):
            bad(f"node {m.binder} is not a binder for C{f.index}")
        return Position(p.structure, p.assignment, m.binder, p.verifier)

    bad("no move applies at this node")


def mover_player(moves: list[Move], verifier: Role) -> Role | None:
    """Player on turn for a uniform move list; None when forced."""
    mover = moves[0].mover
    if mover is Mover.FORCED:
        return None
    return verifier if mover is Mover.VERIFIER else verifier.other()


# ---------------------------------------------------------------------------
# Move (de)serialization for traces, the CLI, and the session service

def move_to_dict(m: Move) -> dict:
    if isinstance(m, PickDisjunct):
        return {"mover": m.mover.value, "kind": "disjunct", "branch": m.branch}
    if isinstance(m, PickWitness):
        return {"mover": m.mover.value, "kind": "witness", "var": m.var, "element": m.element}
    if isinstance(m, PickTuple):
        return {"mover": m.mover.value, "kind": "tuple",
                "vars": list(m.vars), "elements": list(m.elements)}
    if isinstance(m, PickClaimBinder):
        return {"mover": m.mover.value, "kind": "claim_binder", "binder": m.binder}
    if isinstance(m, Descend):
        return {"mover": m.mover.value, "kind": "descend"}
    raise TypeError(f"not a move: {m!r}")


def move_from_dict(d: dict) -> Move:
    mover = Mover(d["mover"])
    kind = d["kind"]
    if kind == "disjunct":
        return PickDisjunct(mover, d["branch"])
    if kind == "witness":
        return PickWitness(mover, d["var"], d["element"])
    if kind == "tuple":
        return PickTuple(mover, tuple(d["vars"]), tuple(d["elements"]))
    if kind == "claim_binder":
        return PickClaimBinder(mover, d["binder"])
    if kind == "descend":
        return Descend(mover)
    raise ValueError(f"unknown move kind {kind!r}")


def describe_move(m: Move, table: FormulaTable, p: Position) -> str:
    """Short human-readable label for a move at position ``p``."""
    f = table.node(p.node).formula
    if isinstance(m, PickDisjunct):
        side = "left" if m.branch == "left" else "right"
        what = "conjunct" if isinstance(f, And) else "disjunct"
        return f"choose the {side} {what}"
    if isinstance(m, PickWitness):
        return f"let {m.var} = {m.element}"
    if isinstance(m, PickTuple):
        binding = ", ".join(f"{v}={e}" for v, e in zip(m.vars, m.elements))
        verb = "insert" if isinstance(f, InsertTuple) else "delete"
        return f"{verb} ({', '.join(m.elements)}) [{binding}]"
    if isinstance(m, PickClaimBinder):
        return f"jump to claim binder at node {m.binder}"
    if isinstance(m, Descend):
        return "continue"
    raise TypeError(f"not a move: {m!r}")
