"""Finite structures with partial functions, partial constants, and
three-valued relations, plus the four in-game mutation operators.

Structures are immutable values: every mutation returns a new structure
and leaves the input untouched.  A relation is either *total* (unlisted
tuples count as negative) or *partial* (it keeps an explicit positive set
and an explicit negative set; everything else is undefined).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

from .syntax import (
    REL_AUXILIARY,
    REL_DECLARED,
    Apply,
    Constant,
    Term,
    Variable,
    Vocabulary,
)


class RelStatus(Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    UNDEFINED = "?"


class ModelFormatError(Exception):
    """Bad model file: syntax, arity, unknown element, or +/- overlap."""


@dataclass(frozen=True)
class RelationTable:
    arity: int
    total: bool
    pos: frozenset[tuple[str, ...]] = frozenset()
    neg: frozenset[tuple[str, ...]] = frozenset()

    def __post_init__(self):
        if self.total and self.neg:
            raise ValueError("total relations keep no explicit negative set")
        overlap = self.pos & self.neg
        if overlap:
            raise ValueError(f"tuples listed both positive and negative: {sorted(overlap)}")


@dataclass(frozen=True)
class FunctionTable:
    arity: int
    entries: tuple[tuple[tuple[str, ...], str], ...] = ()

    @cached_property
    def mapping(self) -> dict[tuple[str, ...], str]:
        return dict(self.entries)


@dataclass(frozen=True, eq=False)
class PartialStructure:
    """Finite model over a fixed element order.

    ``domain`` order is the declaration/insertion order; it fixes element
    indices for the string encoding.  ``fresh_counter`` names elements
    created by the insertion operator (u0, u1, ...).
    """

    domain: tuple[str, ...] = ()
    relations: dict[str, RelationTable] = field(default_factory=dict)
    functions: dict[str, FunctionTable] = field(default_factory=dict)
    constants: dict[str, str | None] = field(default_factory=dict)
    fresh_counter: int = 0

    @cached_property
    def canonical_key(self) -> str:
        parts = ["D:" + ",".join(self.domain)]
        for name in sorted(self.relations):
            rt = self.relations[name]
            parts.append(
                f"R:{name}/{rt.arity}/{'t' if rt.total else 'p'}"
                f"+{sorted(rt.pos)!r}-{sorted(rt.neg)!r}"
            )
        for name in sorted(self.functions):
            ft = self.functions[name]
            parts.append(f"F:{name}/{ft.arity}{sorted(ft.entries)!r}")
        for name in sorted(self.constants):
            parts.append(f"C:{name}={self.constants[name]}")
        return ";".join(parts)

    def __eq__(self, other):
        if not isinstance(other, PartialStructure):
            return NotImplemented
        return self.canonical_key == other.canonical_key

    def __hash__(self):
        return hash(self.canonical_key)

    def rel_status(self, rel: str, tup: tuple[str, ...]) -> RelStatus:
        rt = self.relations[rel]
        if tup in rt.pos:
            return RelStatus.POSITIVE
        if rt.total:
            return RelStatus.NEGATIVE
        if tup in rt.neg:
            return RelStatus.NEGATIVE
        return RelStatus.UNDEFINED


Assignment = dict  # variable name -> element id


def make_structure(
    vocab: Vocabulary,
    domain: tuple[str, ...] = (),
    positive: dict[str, set] | None = None,
    negative: dict[str, set] | None = None,
    total: set[str] | frozenset[str] = frozenset(),
    functions: dict[str, dict] | None = None,
    constants: dict[str, str | None] | None = None,
) -> PartialStructure:
    """Build a structure for ``vocab`` and validate every table against it."""
    positive = positive or {}
    negative = negative or {}
    functions = functions or {}
    constants = constants or {}
    if len(set(domain)) != len(domain):
        raise ModelFormatError(f"duplicate domain elements in {domain}")
    dom = set(domain)

    def check_tuple(name, arity, tup):
        if len(tup) != arity:
            raise ModelFormatError(f"{name}: tuple {tup} does not match arity {arity}")
        for e in tup:
            if e not in dom:
                raise ModelFormatError(f"{name}: unknown element {e!r}")

    rels = {}
    for name, arity, kind in vocab.relations:
        is_total = name in total
        pos = frozenset(tuple(t) for t in positive.get(name, ()))
        neg = frozenset(tuple(t) for t in negative.get(name, ()))
        if kind == REL_AUXILIARY and (pos or neg or is_total):
            raise ModelFormatError(f"auxiliary relation {name} must start empty and partial")
        for t in pos | neg:
            check_tuple(name, arity, t)
        if is_total and neg:
            raise ModelFormatError(f"total relation {name} cannot list negative tuples")
        both = pos & neg
        if both:
            raise ModelFormatError(f"{name}: tuples listed both positive and negative: {sorted(both)}")
        rels[name] = RelationTable(arity, is_total, pos, neg)

    fns = {}
    for name, arity in vocab.functions:
        entries = []
        for args, val in sorted(functions.get(name, {}).items()):
            args = tuple(args)
            check_tuple(name, arity, args)
            if val not in dom:
                raise ModelFormatError(f"{name}: unknown element {val!r}")
            entries.append((args, val))
        fns[name] = FunctionTable(arity, tuple(entries))

    consts = {}
    for name in vocab.constants:
        val = constants.get(name)
        if val is not None and val not in dom:
            raise ModelFormatError(f"constant {name}: unknown element {val!r}")
        consts[name] = val

    return PartialStructure(tuple(domain), rels, fns, consts)


# ---------------------------------------------------------------------------
# Term evaluation

def eval_term(s: PartialStructure, g: Assignment, t: Term) -> str | None:
    """Value of ``t`` in ``s`` under ``g``, or None where undefined.

    A variable outside ``g``, a constant without an interpretation, or a
    function application outside the function's table all come out
    undefined, and undefinedness propagates up through nesting.
    """
    if isinstance(t, Variable):
        return g.get(t.name)
    if isinstance(t, Constant):
        return s.constants.get(t.name)
    if isinstance(t, Apply):
        args = []
        for a in t.args:
            v = eval_term(s, g, a)
            if v is None:
                return None
            args.append(v)
        return s.functions[t.func].mapping.get(tuple(args))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Mutation operators

def insert_element(s: PartialStructure, fresh_negative: bool = False) -> tuple[PartialStructure, str]:
    """Add a fresh isolated element; nothing else changes.

    The new element is named u<counter>, skipping names already taken.  It
    belongs to no positive tuple, no function entry and no constant.  With
    ``fresh_negative`` every partial relation additionally lists all tuples
    involving the newcomer as negative instead of leaving them undefined.
    """
    c = s.fresh_counter
    while f"u{c}" in s.domain:
        c += 1
    name = f"u{c}"
    domain = s.domain + (name,)
    relations = s.relations
    if fresh_negative:
        relations = {}
        for rel, rt in s.relations.items():
            if rt.total:
                relations[rel] = rt
                continue
            new_neg = set(rt.neg)
            for tup in itertools.product(domain, repeat=rt.arity):
                if name in tup and tup not in rt.pos:
                    new_neg.add(tup)
            relations[rel] = RelationTable(rt.arity, False, rt.pos, frozenset(new_neg))
    return replace(s, domain=domain, relations=relations, fresh_counter=c + 1), name


def delete_element(s: PartialStructure, elem: str) -> PartialStructure:
    """Remove ``elem`` and cascade: every tuple, function entry, and
    constant interpretation mentioning it disappears."""
    if elem not in s.domain:
        raise ValueError(f"element {elem!r} not in domain")
    domain = tuple(e for e in s.domain if e != elem)
    relations = {}
    for rel, rt in s.relations.items():
        relations[rel] = RelationTable(
            rt.arity,
            rt.total,
            frozenset(t for t in rt.pos if elem not in t),
            frozenset(t for t in rt.neg if elem not in t),
        )
    functions = {}
    for fn, ft in s.functions.items():
        entries = tuple(
            (args, val) for args, val in ft.entries if elem not in args and val != elem
        )
        functions[fn] = FunctionTable(ft.arity, entries)
    constants = {c: (None if v == elem else v) for c, v in s.constants.items()}
    return replace(s, domain=domain, relations=relations,
                   functions=functions, constants=constants)


def _check_rel_tuple(s: PartialStructure, rel: str, tup: tuple[str, ...]) -> RelationTable:
    rt = s.relations.get(rel)
    if rt is None:
        raise ValueError(f"unknown relation {rel!r}")
    if len(tup) != rt.arity:
        raise ValueError(f"{rel} has arity {rt.arity}, got tuple {tup}")
    for e in tup:
        if e not in s.domain:
            raise ValueError(f"element {e!r} not in domain")
    return rt


def insert_tuple(s: PartialStructure, rel: str, tup: tuple[str, ...]) -> PartialStructure:
    """Make ``tup`` positively belong to ``rel``, whatever its prior status."""
    rt = _check_rel_tuple(s, rel, tup)
    tup = tuple(tup)
    new = RelationTable(rt.arity, rt.total, rt.pos | {tup}, rt.neg - {tup})
    return replace(s, relations={**s.relations, rel: new})


def delete_tuple(s: PartialStructure, rel: str, tup: tuple[str, ...]) -> PartialStructure:
    """Make ``tup`` not belong to ``rel``, whatever its prior status.

    In partial mode the tuple lands in the explicit negative set; in total
    mode leaving the positive set already means negative.
    """
    rt = _check_rel_tuple(s, rel, tup)
    tup = tuple(tup)
    if rt.total:
        new = RelationTable(rt.arity, True, rt.pos - {tup}, frozenset())
    else:
        new = RelationTable(rt.arity, False, rt.pos - {tup}, rt.neg | {tup})
    return replace(s, relations={**s.relations, rel: new})


# ---------------------------------------------------------------------------
# Model file format

_TUPLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_tuples(rest: str, lineno: int) -> list[tuple[str, ...]]:
    stripped = _TUPLE_RE.sub("", rest).replace(" ", "").replace("\t", "")
    if stripped:
        raise ModelFormatError(f"line {lineno}: malformed tuple list {rest!r}")
    out = []
    for m in _TUPLE_RE.finditer(rest):
        items = tuple(p.strip() for p in m.group(1).split(",")) if m.group(1).strip() else ()
        if any(not p for p in items):
            raise ModelFormatError(f"line {lineno}: empty element name in {m.group(0)}")
        out.append(items)
    return out


def parse_model(text: str) -> tuple[Vocabulary, PartialStructure]:
    """Parse the line-oriented model format.

    ::

        # comment
        domain: a b c
        relation R/2 partial
          + (a,b) (b,c)
          - (a,a)
        relation S/1 total
          + (a)
        function f/1:
          (a) -> b
        constant c0 = a
        constant c1 = undef
        aux X/2
    """
    domain: tuple[str, ...] | None = None
    relations: list[tuple[str, int, str]] = []
    functions: list[tuple[str, int]] = []
    constants: list[str] = []
    positive: dict[str, set] = {}
    negative: dict[str, set] = {}
    total: set[str] = set()
    fn_entries: dict[str, dict] = {}
    const_vals: dict[str, str | None] = {}
    current: tuple[str, str] | None = None  # ("relation"|"function", name)

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("domain:"):
            if domain is not None:
                raise ModelFormatError(f"line {lineno}: duplicate domain declaration")
            domain = tuple(line[len("domain:"):].split())
            current = None
            continue
        m = re.fullmatch(r"relation\s+(\w+)\s*/\s*(\d+)\s+(partial|total)", line)
        if m:
            name, arity, mode = m.group(1), int(m.group(2)), m.group(3)
            relations.append((name, arity, REL_DECLARED))
            if mode == "total":
                total.add(name)
            positive.setdefault(name, set())
            negative.setdefault(name, set())
            current = ("relation", name)
            continue
        m = re.fullmatch(r"aux\s+(\w+)\s*/\s*(\d+)", line)
        if m:
            relations.append((m.group(1), int(m.group(2)), REL_AUXILIARY))
            current = None
            continue
        m = re.fullmatch(r"function\s+(\w+)\s*/\s*(\d+)\s*:?", line)
        if m:
            functions.append((m.group(1), int(m.group(2))))
            fn_entries.setdefault(m.group(1), {})
            current = ("function", m.group(1))
            continue
        m = re.fullmatch(r"constant\s+(\w+)\s*=\s*(\w+)", line)
        if m:
            constants.append(m.group(1))
            const_vals[m.group(1)] = None if m.group(2) == "undef" else m.group(2)
            current = None
            continue
        if line[0] in "+-":
            if not current or current[0] != "relation":
                raise ModelFormatError(f"line {lineno}: tuple list outside a relation block")
            target = positive if line[0] == "+" else negative
            for tup in _parse_tuples(line[1:], lineno):
                target[current[1]].add(tup)
            continue
        m = re.fullmatch(r"\(([^()]*)\)\s*->\s*(\w+)", line)
        if m:
            if not current or current[0] != "function":
                raise ModelFormatError(f"line {lineno}: function entry outside a function block")
            args = tuple(p.strip() for p in m.group(1).split(",")) if m.group(1).strip() else ()
            existing = fn_entries[current[1]]
            if args in existing and existing[args] != m.group(2):
                raise ModelFormatError(f"line {lineno}: conflicting entries for {current[1]}{args}")
            existing[args] = m.group(2)
            continue
        raise ModelFormatError(f"line {lineno}: cannot parse {line!r}")

    if domain is None:
        raise ModelFormatError("missing 'domain:' declaration")
    try:
        vocab = Vocabulary(tuple(relations), tuple(functions), tuple(constants))
    except ValueError as e:
        raise ModelFormatError(str(e)) from None
    structure = make_structure(vocab, domain, positive, negative, total,
                               fn_entries, const_vals)
    return vocab, structure


# ---------------------------------------------------------------------------
# String encoding

def encode_model(s: PartialStructure) -> str:
    """Deterministic string form of a finite structure.

    ``n=<size>;`` then one section per relation in name order,
    ``<name>:<arity>:`` followed by one status character per tuple
    ('+'/'-'/'?') in lexicographic order over domain indices, then ``;``.
    Functions follow the same header with one entry per argument tuple,
    the image's domain index in decimal or '?', ':'-separated; constants
    are encoded as arity-0 functions with a single entry.
    """
    k = len(s.domain)
    out = [f"n={k};"]
    for name in sorted(s.relations):
        rt = s.relations[name]
        chars = []
        for idx in itertools.product(range(k), repeat=rt.arity):
            tup = tuple(s.domain[i] for i in idx)
            chars.append(s.rel_status(name, tup).value)
        out.append(f"{name}:{rt.arity}:{''.join(chars)};")
    index = {e: i for i, e in enumerate(s.domain)}
    for name in sorted(s.functions):
        ft = s.functions[name]
        entries = []
        for idx in itertools.product(range(k), repeat=ft.arity):
            args = tuple(s.domain[i] for i in idx)
            val = ft.mapping.get(args)
            entries.append("?" if val is None else str(index[val]))
        out.append(f"{name}:{ft.arity}:{':'.join(entries)};")
    for name in sorted(s.constants):
        val = s.constants[name]
        entry = "?" if val is None else str(index[val])
        out.append(f"{name}:0:{entry};")
    return "".join(out)
