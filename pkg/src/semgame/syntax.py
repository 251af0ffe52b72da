"""Abstract and concrete syntax for the logic.

The language extends first-order logic (with equality, partial terms and
three-valued relations) by six game-level constructs:

* ``insert x. f``        -- add a fresh isolated element, bound to ``x``
* ``delete x. f``        -- remove the element currently named by ``x``
* ``insertT R(x,y). f``  -- add a chosen tuple to relation ``R``
* ``deleteT R(x,y). f``  -- force a chosen tuple out of relation ``R``
* ``claim Ci. f``        -- name the subformula ``f`` as claim ``Ci``
* ``Ci``                 -- atomic reference back to a named claim

plus two connectives that only the compositional evaluator understands:
``wnot f`` (weak negation) and ``det f`` (determinacy).  The grammar is a
fixed ASCII surface syntax: binary connectives are always parenthesized,
``(f & g)`` / ``(f | g)``, and the quantifier-like forms end their binder
with a dot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Vocabulary

REL_DECLARED = "declared"
REL_AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class Vocabulary:
    """Symbol table: relations (with arity and kind), functions, constants.

    Auxiliary relations are scratch symbols available to formulas even
    though they are not part of the modelled signature; structures start
    them out empty and undefined everywhere.
    """

    relations: tuple[tuple[str, int, str], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [r[0] for r in self.relations] + [f[0] for f in self.functions] + list(self.constants)
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValueError(f"duplicate symbol names in vocabulary: {sorted(dupes)}")
        for name, arity, kind in self.relations:
            if arity < 1:
                raise ValueError(f"relation {name} must have arity >= 1")
            if kind not in (REL_DECLARED, REL_AUXILIARY):
                raise ValueError(f"relation {name}: bad kind {kind!r}")
        for name, arity in self.functions:
            if arity < 1:
                raise ValueError(f"function {name} must have arity >= 1")
        for name in names:
            if re.fullmatch(r"C[0-9]+", name):
                raise ValueError(f"symbol name {name} collides with claim-atom syntax")

    def relation_arity(self, name: str) -> int | None:
        for rel, arity, _ in self.relations:
            if rel == name:
                return arity
        return None

    def function_arity(self, name: str) -> int | None:
        for fn, arity in self.functions:
            if fn == name:
                return arity
        return None

    def is_constant(self, name: str) -> bool:
        return name in self.constants

    def relation_names(self) -> list[str]:
        return [r[0] for r in self.relations]


EMPTY_VOCABULARY = Vocabulary()


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Variable(Term):
    name: str


@dataclass(frozen=True)
class Constant(Term):
    name: str


@dataclass(frozen=True)
class Apply(Term):
    func: str
    args: tuple[Term, ...]


def term_variables(t: Term) -> frozenset[str]:
    if isinstance(t, Variable):
        return frozenset((t.name,))
    if isinstance(t, Apply):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_variables(a)
        return out
    return frozenset()


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class RelAtom(Formula):
    rel: str
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class EqAtom(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class ClaimAtom(Formula):
    index: int


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class WNot(Formula):
    body: Formula


@dataclass(frozen=True)
class Det(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class InsertElem(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class DeleteElem(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class InsertTuple(Formula):
    rel: str
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class DeleteTuple(Formula):
    rel: str
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Claim(Formula):
    index: int
    body: Formula


GAME_ONLY = (InsertElem, DeleteElem, InsertTuple, DeleteTuple, Claim, ClaimAtom)
COMPOSITIONAL_ONLY = (WNot, Det)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (RelAtom, EqAtom, ClaimAtom)):
        return ()
    if isinstance(f, (Not, WNot, Det, Exists, Forall, InsertElem, DeleteElem,
                      InsertTuple, DeleteTuple, Claim)):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    raise TypeError(f"not a formula: {f!r}")


def contains_insert_elem(f: Formula) -> bool:
    if isinstance(f, InsertElem):
        return True
    return any(contains_insert_elem(c) for c in children(f))


def contains_compositional_only(f: Formula) -> bool:
    if isinstance(f, COMPOSITIONAL_ONLY):
        return True
    return any(contains_compositional_only(c) for c in children(f))


def contains_game_only(f: Formula) -> bool:
    if isinstance(f, GAME_ONLY):
        return True
    return any(contains_game_only(c) for c in children(f))


# ---------------------------------------------------------------------------
# Lexer

class ParseError(Exception):
    """Syntax or symbol error, with 1-based line/column position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {
    "not", "wnot", "det", "exists", "forall",
    "insert", "delete", "insertT", "deleteT", "claim",
}

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[().,=&|]|\S")


@dataclass(frozen=True)
class _Tok:
    kind: str   # 'kw', 'ident', 'claim', or a literal punctuation char
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            word = m.group(0)
            col = pos + 1
            if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", word):
                if word in KEYWORDS:
                    toks.append(_Tok("kw", word, lineno, col))
                elif re.fullmatch(r"C[0-9]+", word):
                    toks.append(_Tok("claim", word, lineno, col))
                else:
                    toks.append(_Tok("ident", word, lineno, col))
            elif word in "().,=&|":
                toks.append(_Tok(word, word, lineno, col))
            else:
                raise ParseError(f"unexpected character {word!r}", lineno, col)
            pos = m.end()
    return toks


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, toks: list[_Tok], vocab: Vocabulary, source: str):
        self.toks = toks
        self.vocab = vocab
        self.pos = 0
        self.game_depth = 0  # nesting inside insert/delete/insertT/deleteT/claim
        # end-of-input position for diagnostics
        lines = source.split("\n")
        self.end_line = len(lines)
        self.end_col = len(lines[-1]) + 1

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_line, self.end_col)
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            got = repr(tok.text) if tok else "end of input"
            where = (tok.line, tok.col) if tok else (self.end_line, self.end_col)
            raise ParseError(f"expected {what}, got {got}", *where)
        return self.next()

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        if tok is None:
            raise ParseError(msg, self.end_line, self.end_col)
        raise ParseError(msg, tok.line, tok.col)

    # formula := quantlike | binary | unary | atom
    def formula(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a formula", self.end_line, self.end_col)
        if tok.kind == "kw":
            return self.keyword_form(tok)
        if tok.kind == "(":
            return self.binary()
        if tok.kind == "claim":
            self.next()
            return ClaimAtom(int(tok.text[1:]))
        if tok.kind == "ident":
            return self.atom()
        self.error(f"expected a formula, got {tok.text!r}")

    def keyword_form(self, tok: _Tok) -> Formula:
        self.next()
        kw = tok.text
        if kw in ("not", "wnot", "det"):
            if kw != "not" and self.game_depth > 0:
                self.error(f"{kw!r} may not occur inside insert/delete/claim constructs; "
                           "it has no game rule", tok)
            body = self.formula()
            return {"not": Not, "wnot": WNot, "det": Det}[kw](body)
        if kw in ("exists", "forall", "insert", "delete"):
            var = self.expect("ident", "a variable name").text
            self.expect(".", "'.'")
            body = self.game_body(kw in ("insert", "delete"))
            ctor = {"exists": Exists, "forall": Forall,
                    "insert": InsertElem, "delete": DeleteElem}[kw]
            return ctor(var, body)
        if kw in ("insertT", "deleteT"):
            rel_tok = self.expect("ident", "a relation name")
            arity = self.vocab.relation_arity(rel_tok.text)
            if arity is None:
                self.error(f"unknown relation {rel_tok.text!r}", rel_tok)
            self.expect("(", "'('")
            vars_ = [self.expect("ident", "a variable name").text]
            while self.peek() and self.peek().kind == ",":
                self.next()
                vars_.append(self.expect("ident", "a variable name").text)
            self.expect(")", "')'")
            if len(vars_) != arity:
                self.error(f"relation {rel_tok.text} has arity {arity}, got {len(vars_)} variables", rel_tok)
            self.expect(".", "'.'")
            body = self.game_body(True)
            ctor = InsertTuple if kw == "insertT" else DeleteTuple
            return ctor(rel_tok.text, tuple(vars_), body)
        if kw == "claim":
            c = self.expect("claim", "a claim name like C0")
            self.expect(".", "'.'")
            body = self.game_body(True)
            return Claim(int(c.text[1:]), body)
        self.error(f"unexpected keyword {kw!r}", tok)

    def game_body(self, is_game_construct: bool) -> Formula:
        if is_game_construct:
            self.game_depth += 1
        try:
            return self.formula()
        finally:
            if is_game_construct:
                self.game_depth -= 1

    def binary(self) -> Formula:
        self.expect("(", "'('")
        left = self.formula()
        op = self.peek()
        if op is None or op.kind not in ("&", "|"):
            self.error("expected '&' or '|'")
        self.next()
        right = self.formula()
        self.expect(")", "')'")
        return And(left, right) if op.kind == "&" else Or(left, right)

    def atom(self) -> Formula:
        tok = self.peek()
        name = tok.text
        nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
        if self.vocab.relation_arity(name) is not None and nxt and nxt.kind == "(":
            self.next()
            self.next()
            terms = [self.term()]
            while self.peek() and self.peek().kind == ",":
                self.next()
                terms.append(self.term())
            self.expect(")", "')'")
            arity = self.vocab.relation_arity(name)
            if len(terms) != arity:
                self.error(f"relation {name} has arity {arity}, got {len(terms)} arguments", tok)
            return RelAtom(name, tuple(terms))
        left = self.term()
        self.expect("=", "'='")
        right = self.term()
        return EqAtom(left, right)

    def term(self) -> Term:
        tok = self.expect("ident", "a term")
        name = tok.text
        if self.peek() and self.peek().kind == "(":
            arity = self.vocab.function_arity(name)
            if arity is None:
                self.error(f"unknown function {name!r}", tok)
            self.next()
            args = [self.term()]
            while self.peek() and self.peek().kind == ",":
                self.next()
                args.append(self.term())
            self.expect(")", "')'")
            if len(args) != arity:
                self.error(f"function {name} has arity {arity}, got {len(args)} arguments", tok)
            return Apply(name, tuple(args))
        if self.vocab.relation_arity(name) is not None:
            self.error(f"{name} is a relation symbol, not a term", tok)
        if self.vocab.function_arity(name) is not None:
            self.error(f"function {name} needs arguments", tok)
        if self.vocab.is_constant(name):
            return Constant(name)
        return Variable(name)


def parse_formula(text: str, vocab: Vocabulary = EMPTY_VOCABULARY) -> Formula:
    """Parse the ASCII surface syntax into an AST.

    Symbols are resolved against ``vocab``: identifiers applied to argument
    lists must be declared relations (in formula position) or functions (in
    term position); bare identifiers are constants if declared, variables
    otherwise.  ``wnot``/``det`` are rejected inside the game-level
    constructs, which have no rules for them.
    """
    toks = _lex(text)
    p = _Parser(toks, vocab, text)
    f = p.formula()
    left = p.peek()
    if left is not None:
        raise ParseError(f"trailing input starting at {left.text!r}", left.line, left.col)
    return f


# ---------------------------------------------------------------------------
# Printer

def print_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, Apply):
        return f"{t.func}({', '.join(print_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def print_formula(f: Formula) -> str:
    """Render the canonical concrete syntax; re-parses to the same AST."""
    if isinstance(f, RelAtom):
        return f"{f.rel}({', '.join(print_term(t) for t in f.terms)})"
    if isinstance(f, EqAtom):
        return f"{print_term(f.left)} = {print_term(f.right)}"
    if isinstance(f, ClaimAtom):
        return f"C{f.index}"
    if isinstance(f, Not):
        return f"not {print_formula(f.body)}"
    if isinstance(f, WNot):
        return f"wnot {print_formula(f.body)}"
    if isinstance(f, Det):
        return f"det {print_formula(f.body)}"
    if isinstance(f, And):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Or):
        return f"({print_formula(f.left)} | {print_formula(f.right)})"
    if isinstance(f, Exists):
        return f"exists {f.var}. {print_formula(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {print_formula(f.body)}"
    if isinstance(f, InsertElem):
        return f"insert {f.var}. {print_formula(f.body)}"
    if isinstance(f, DeleteElem):
        return f"delete {f.var}. {print_formula(f.body)}"
    if isinstance(f, InsertTuple):
        return f"insertT {f.rel}({', '.join(f.vars)}). {print_formula(f.body)}"
    if isinstance(f, DeleteTuple):
        return f"deleteT {f.rel}({', '.join(f.vars)}). {print_formula(f.body)}"
    if isinstance(f, Claim):
        return f"claim C{f.index}. {print_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def print_with_spans(table: "FormulaTable") -> tuple[str, dict[int, tuple[int, int]]]:
    """Canonical text of the table's root plus per-node character spans.

    The spans index into the returned string, so a UI can highlight the
    subformula a game position currently sits on.
    """
    spans: dict[int, tuple[int, int]] = {}
    out: list[str] = []
    length = 0

    def emit(s: str):
        nonlocal length
        out.append(s)
        length += len(s)

    def walk(node_id: int):
        info = table.node(node_id)
        f = info.formula
        start = length
        if isinstance(f, (RelAtom, EqAtom, ClaimAtom)):
            emit(print_formula(f))
        elif isinstance(f, Not):
            emit("not ")
            walk(info.children[0])
        elif isinstance(f, WNot):
            emit("wnot ")
            walk(info.children[0])
        elif isinstance(f, Det):
            emit("det ")
            walk(info.children[0])
        elif isinstance(f, (And, Or)):
            emit("(")
            walk(info.children[0])
            emit(" & " if isinstance(f, And) else " | ")
            walk(info.children[1])
            emit(")")
        elif isinstance(f, (Exists, Forall, InsertElem, DeleteElem)):
            kw = {Exists: "exists", Forall: "forall",
                  InsertElem: "insert", DeleteElem: "delete"}[type(f)]
            emit(f"{kw} {f.var}. ")
            walk(info.children[0])
        elif isinstance(f, (InsertTuple, DeleteTuple)):
            kw = "insertT" if isinstance(f, InsertTuple) else "deleteT"
            emit(f"{kw} {f.rel}({', '.join(f.vars)}). ")
            walk(info.children[0])
        elif isinstance(f, Claim):
            emit(f"claim C{f.index}. ")
            walk(info.children[0])
        else:
            raise TypeError(f"not a formula: {f!r}")
        spans[node_id] = (start, length)

    walk(0)
    return "".join(out), spans


# ---------------------------------------------------------------------------
# Natural-language reading

def render_natural_language(f: Formula) -> str:
    """Translate a formula into its plain-English reading.

    Negation reads as falsifiability ("it is falsifiable that ...") rather
    than classical denial, and the mutation/claim constructs read as
    possibility statements ("it is possible to insert ...", "it is possible
    to verify the claim Ci which states that ...").  ``wnot``/``det`` get
    the analogous readings "it is not verifiable that" and "it is
    determined whether".
    """
    if isinstance(f, RelAtom):
        return print_formula(f)
    if isinstance(f, EqAtom):
        return f"{print_term(f.left)} equals {print_term(f.right)}"
    if isinstance(f, ClaimAtom):
        return f"C{f.index}"
    if isinstance(f, Not):
        return f"it is falsifiable that {render_natural_language(f.body)}"
    if isinstance(f, WNot):
        return f"it is not verifiable that {render_natural_language(f.body)}"
    if isinstance(f, Det):
        return f"it is determined whether {render_natural_language(f.body)}"
    if isinstance(f, And):
        return f"{render_natural_language(f.left)} and {render_natural_language(f.right)}"
    if isinstance(f, Or):
        return f"{render_natural_language(f.left)} or {render_natural_language(f.right)}"
    if isinstance(f, Exists):
        return f"there exists an {f.var} such that {render_natural_language(f.body)}"
    if isinstance(f, Forall):
        return f"for every {f.var} it holds that {render_natural_language(f.body)}"
    if isinstance(f, InsertElem):
        return f"it is possible to insert a new element {f.var} such that {render_natural_language(f.body)}"
    if isinstance(f, DeleteElem):
        return f"it is possible to delete the element {f.var} such that {render_natural_language(f.body)}"
    if isinstance(f, InsertTuple):
        return (f"it is possible to insert a tuple ({', '.join(f.vars)}) into {f.rel} "
                f"such that {render_natural_language(f.body)}")
    if isinstance(f, DeleteTuple):
        return (f"it is possible to delete a tuple ({', '.join(f.vars)}) from {f.rel} "
                f"such that {render_natural_language(f.body)}")
    if isinstance(f, Claim):
        return (f"it is possible to verify the claim C{f.index} "
                f"which states that {render_natural_language(f.body)}")
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Subformula table

@dataclass(frozen=True)
class NodeInfo:
    id: int
    formula: Formula
    children: tuple[int, ...]
    free_vars: frozenset[str]


@dataclass(frozen=True)
class FormulaTable:
    """Preorder index of every subformula occurrence of a root formula.

    Node 0 is the root.  ``claim_binders`` maps each claim index to the ids
    of its ``claim Ci.`` binder occurrences in source (preorder) order; the
    game's back-reference move chooses among them.  ``free_vars`` treats the
    quantifiers, element/tuple insertion and deletion, all as binding their
    variables; element deletion additionally reads its variable, so that
    variable stays free at the deletion node itself.
    """

    root: Formula
    nodes: tuple[NodeInfo, ...]
    claim_binders: dict[int, tuple[int, ...]] = field(compare=False)
    claim_free: bool = True

    def node(self, node_id: int) -> NodeInfo:
        return self.nodes[node_id]

    def binders_for(self, index: int) -> tuple[int, ...]:
        return self.claim_binders.get(index, ())


def _free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, RelAtom):
        out: frozenset[str] = frozenset()
        for t in f.terms:
            out |= term_variables(t)
        return out
    if isinstance(f, EqAtom):
        return term_variables(f.left) | term_variables(f.right)
    if isinstance(f, ClaimAtom):
        return frozenset()
    if isinstance(f, (Exists, Forall, InsertElem)):
        return _free_vars(f.body) - {f.var}
    if isinstance(f, DeleteElem):
        # deletion reads the variable's current value before unbinding it
        return _free_vars(f.body) | {f.var}
    if isinstance(f, (InsertTuple, DeleteTuple)):
        return _free_vars(f.body) - set(f.vars)
    subs = children(f)
    out = frozenset()
    for c in subs:
        out |= _free_vars(c)
    return out


def index_subformulas(root: Formula) -> FormulaTable:
    """Assign preorder ids to every subformula occurrence of ``root``."""
    nodes: list[NodeInfo] = []
    binders: dict[int, list[int]] = {}
    has_claims = False

    def walk(f: Formula) -> int:
        nonlocal has_claims
        node_id = len(nodes)
        nodes.append(None)  # placeholder; children get consecutive ids
        if isinstance(f, Claim):
            binders.setdefault(f.index, []).append(node_id)
            has_claims = True
        elif isinstance(f, ClaimAtom):
            has_claims = True
        child_ids = tuple(walk(c) for c in children(f))
        nodes[node_id] = NodeInfo(node_id, f, child_ids, _free_vars(f))
        return node_id

    walk(root)
    return FormulaTable(
        root=root,
        nodes=tuple(nodes),
        claim_binders={i: tuple(ids) for i, ids in binders.items()},
        claim_free=not has_claims,
    )
