"""Compositional two-judgment evaluation over partial structures.

Every formula gets a pair of booleans: ``plus`` (the formula holds
positively) and ``minus`` (it holds negatively).  Undefined terms and
unspecified relation tuples make atoms neither-true-nor-false, ``not``
swaps the two judgments, and the weak negation / determinacy connectives
live only here; the constructs that mutate the model or loop have no
compositional reading and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .structure import Assignment, PartialStructure, RelStatus, eval_term
from .syntax import (
    And,
    Det,
    EqAtom,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    RelAtom,
    WNot,
    GAME_ONLY,
    index_subformulas,
)


class UnsupportedConstructError(Exception):
    """Formula uses a construct the requested semantics does not define."""


@dataclass(frozen=True)
class TruthStatus:
    plus: bool
    minus: bool

    def __str__(self):
        return f"plus={str(self.plus).lower()} minus={str(self.minus).lower()}"


def evaluate(s: PartialStructure, g: Assignment, formula: Formula) -> TruthStatus:
    """Compute the (plus, minus) judgment pair by structural recursion.

    Atoms demand their terms defined; a relational atom over a partial
    relation additionally demands the relation specified on the tuple.
    Conjunction/disjunction and the quantifier pair are dual; quantifiers
    over the empty domain come out vacuously (exists: minus, forall: plus).
    Recursion is memoized on (subformula, assignment restricted to its free
    variables), so towers of quantifiers stay polynomial in domain size.
    """
    table = index_subformulas(formula)
    for info in table.nodes:
        if isinstance(info.formula, GAME_ONLY):
            raise UnsupportedConstructError(
                f"{type(info.formula).__name__} has no compositional semantics; "
                "use the game solver")
    memo: dict[tuple, tuple[bool, bool]] = {}

    def rec(node_id: int, g: Assignment) -> tuple[bool, bool]:
        info = table.node(node_id)
        key = (node_id, tuple(sorted((v, g[v]) for v in info.free_vars if v in g)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        f = info.formula
        if isinstance(f, RelAtom):
            vals = [eval_term(s, g, t) for t in f.terms]
            if any(v is None for v in vals):
                res = (False, False)
            else:
                status = s.rel_status(f.rel, tuple(vals))
                res = (status is RelStatus.POSITIVE, status is RelStatus.NEGATIVE)
        elif isinstance(f, EqAtom):
            a = eval_term(s, g, f.left)
            b = eval_term(s, g, f.right)
            if a is None or b is None:
                res = (False, False)
            else:
                res = (a == b, a != b)
        elif isinstance(f, Not):
            p, m = rec(info.children[0], g)
            res = (m, p)
        elif isinstance(f, WNot):
            p, m = rec(info.children[0], g)
            res = (not p, not m)
        elif isinstance(f, Det):
            p, m = rec(info.children[0], g)
            res = (p or m, not p and not m)
        elif isinstance(f, And):
            p1, m1 = rec(info.children[0], g)
            p2, m2 = rec(info.children[1], g)
            res = (p1 and p2, m1 or m2)
        elif isinstance(f, Or):
            p1, m1 = rec(info.children[0], g)
            p2, m2 = rec(info.children[1], g)
            res = (p1 or p2, m1 and m2)
        elif isinstance(f, Exists):
            sub = [rec(info.children[0], {**g, f.var: a}) for a in s.domain]
            res = (any(p for p, _ in sub), all(m for _, m in sub))
        elif isinstance(f, Forall):
            sub = [rec(info.children[0], {**g, f.var: a}) for a in s.domain]
            res = (all(p for p, _ in sub), any(m for _, m in sub))
        else:
            raise UnsupportedConstructError(f"unexpected node {type(f).__name__}")
        memo[key] = res
        return res

    plus, minus = rec(0, g)
    return TruthStatus(plus, minus)
