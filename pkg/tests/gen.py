"""Random instance generators shared by the unit and acceptance suites.

Everything is driven by an explicit random.Random so every suite run is
reproducible from its seed.
"""

from __future__ import annotations

import random

from semgame.structure import PartialStructure, make_structure
from semgame.syntax import (
    And,
    Apply,
    Claim,
    ClaimAtom,
    Constant,
    DeleteElem,
    DeleteTuple,
    Det,
    EqAtom,
    Exists,
    Forall,
    Formula,
    InsertElem,
    InsertTuple,
    Not,
    Or,
    RelAtom,
    Term,
    Variable,
    Vocabulary,
    WNot,
)

VARS = ["x", "y", "z"]


def rand_vocab(rng: random.Random) -> Vocabulary:
    relations = [("R", rng.choice([1, 1, 2]), "declared")]
    if rng.random() < 0.5:
        relations.append(("S", 1, "declared"))
    functions = [("f", 1)] if rng.random() < 0.4 else []
    constants = ("c",) if rng.random() < 0.4 else ()
    return Vocabulary(tuple(relations), tuple(functions), tuple(constants))


def rand_structure(rng: random.Random, vocab: Vocabulary,
                   min_size: int = 0, max_size: int = 4) -> PartialStructure:
    size = rng.randint(min_size, max_size)
    domain = tuple(f"e{i}" for i in range(size))
    positive: dict[str, set] = {}
    negative: dict[str, set] = {}
    total: set[str] = set()
    for name, arity, kind in vocab.relations:
        if kind == "auxiliary":
            continue
        if rng.random() < 0.5:
            total.add(name)
        pos, neg = set(), set()
        for tup in _tuples(domain, arity):
            roll = rng.random()
            if roll < 0.35:
                pos.add(tup)
            elif roll < 0.6 and name not in total:
                neg.add(tup)
        positive[name], negative[name] = pos, neg
    functions = {}
    for name, arity in vocab.functions:
        table = {}
        for tup in _tuples(domain, arity):
            if rng.random() < 0.6:
                table[tup] = rng.choice(domain)
        functions[name] = table
    constants = {}
    for name in vocab.constants:
        constants[name] = rng.choice(domain) if domain and rng.random() < 0.7 else None
    return make_structure(vocab, domain, positive, negative, total, functions, constants)


def _tuples(domain, arity):
    if arity == 1:
        return [(e,) for e in domain]
    return [(a, b) for a in domain for b in domain]


def rand_term(rng: random.Random, vocab: Vocabulary, depth: int = 1) -> Term:
    roll = rng.random()
    if depth > 0 and vocab.functions and roll < 0.25:
        name, arity = vocab.functions[0]
        return Apply(name, tuple(rand_term(rng, vocab, depth - 1) for _ in range(arity)))
    if vocab.constants and roll < 0.45:
        return Constant(rng.choice(vocab.constants))
    return Variable(rng.choice(VARS))


def _rand_atom(rng: random.Random, vocab: Vocabulary) -> Formula:
    if rng.random() < 0.6:
        name, arity, _ = rng.choice(vocab.relations)
        return RelAtom(name, tuple(rand_term(rng, vocab) for _ in range(arity)))
    return EqAtom(rand_term(rng, vocab), rand_term(rng, vocab))


def rand_fo_formula(rng: random.Random, vocab: Vocabulary, size: int) -> Formula:
    """Random formula over atoms, not/and/or and both quantifiers; no weak
    negation, no determinacy, no game constructs.  ``size`` bounds the
    number of formula constructors."""
    if size <= 1:
        return _rand_atom(rng, vocab)
    k = rng.choice(["not", "and", "or", "exists", "forall"])
    if k == "not":
        return Not(rand_fo_formula(rng, vocab, size - 1))
    if k in ("and", "or"):
        left_size = rng.randint(1, size - 2) if size > 2 else 1
        left = rand_fo_formula(rng, vocab, left_size)
        right = rand_fo_formula(rng, vocab, size - 1 - left_size)
        return And(left, right) if k == "and" else Or(left, right)
    var = rng.choice(VARS)
    body = rand_fo_formula(rng, vocab, size - 1)
    return Exists(var, body) if k == "exists" else Forall(var, body)


def rand_compositional_formula(rng: random.Random, vocab: Vocabulary, size: int) -> Formula:
    """Like rand_fo_formula but weak negation and determinacy may appear."""
    if size <= 1:
        return _rand_atom(rng, vocab)
    k = rng.choice(["not", "wnot", "det", "and", "or", "exists", "forall"])
    if k in ("not", "wnot", "det"):
        body = rand_compositional_formula(rng, vocab, size - 1)
        return {"not": Not, "wnot": WNot, "det": Det}[k](body)
    if k in ("and", "or"):
        left_size = rng.randint(1, size - 2) if size > 2 else 1
        left = rand_compositional_formula(rng, vocab, left_size)
        right = rand_compositional_formula(rng, vocab, size - 1 - left_size)
        return And(left, right) if k == "and" else Or(left, right)
    var = rng.choice(VARS)
    body = rand_compositional_formula(rng, vocab, size - 1)
    return Exists(var, body) if k == "exists" else Forall(var, body)


def rand_game_formula(rng: random.Random, vocab: Vocabulary, size: int,
                      claims: tuple[int, ...] = ()) -> Formula:
    """Random formula over the full game language (no wnot/det).

    Claim atoms mostly refer to binders in scope so the generated games
    actually loop; an unbound claim atom slips in occasionally to cover
    the dead-end rule.
    """
    if size <= 1:
        if claims and rng.random() < 0.3:
            return ClaimAtom(rng.choice(claims))
        if rng.random() < 0.04:
            return ClaimAtom(9)  # unbound on purpose
        return _rand_atom(rng, vocab)
    k = rng.choice(["not", "and", "or", "exists", "forall",
                    "insert", "delete", "insertT", "deleteT", "claim"])
    if k == "not":
        return Not(rand_game_formula(rng, vocab, size - 1, claims))
    if k in ("and", "or"):
        left_size = rng.randint(1, size - 2) if size > 2 else 1
        left = rand_game_formula(rng, vocab, left_size, claims)
        right = rand_game_formula(rng, vocab, size - 1 - left_size, claims)
        return And(left, right) if k == "and" else Or(left, right)
    if k in ("exists", "forall", "insert", "delete"):
        var = rng.choice(VARS)
        body = rand_game_formula(rng, vocab, size - 1, claims)
        ctor = {"exists": Exists, "forall": Forall,
                "insert": InsertElem, "delete": DeleteElem}[k]
        return ctor(var, body)
    if k in ("insertT", "deleteT"):
        unary = [r for r in vocab.relations if r[1] == 1]
        name, arity, _ = rng.choice(unary) if unary and rng.random() < 0.7 else rng.choice(vocab.relations)
        vars_ = tuple(rng.choice(VARS) for _ in range(arity))
        body = rand_game_formula(rng, vocab, size - 1, claims)
        return (InsertTuple if k == "insertT" else DeleteTuple)(name, vars_, body)
    index = rng.randint(0, 2)
    body = rand_game_formula(rng, vocab, size - 1, claims + (index,))
    return Claim(index, body)


def rand_assignment(rng: random.Random, structure: PartialStructure) -> dict:
    g = {}
    for v in VARS:
        if structure.domain and rng.random() < 0.4:
            g[v] = rng.choice(structure.domain)
    return g
