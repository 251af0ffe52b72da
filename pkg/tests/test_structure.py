import random

import pytest

import gen
from semgame.structure import (
    ModelFormatError,
    PartialStructure,
    RelStatus,
    delete_element,
    delete_tuple,
    encode_model,
    eval_term,
    insert_element,
    insert_tuple,
    make_structure,
    parse_model,
)
from semgame.syntax import Apply, Constant, Variable, Vocabulary

VF = Vocabulary((("R", 2, "declared"),), (("f", 1),), ("c",))


def small():
    return make_structure(
        VF, ("a", "b"),
        positive={"R": {("a", "b")}},
        functions={"f": {("a",): "b"}},
        constants={"c": "b"},
    )


# --- term evaluation --------------------------------------------------------

def test_eval_term_lookup():
    s = small()
    assert eval_term(s, {"x": "a"}, Apply("f", (Variable("x"),))) == "b"


def test_eval_term_undefined_composition():
    s = small()
    t = Apply("f", (Apply("f", (Variable("x"),)),))
    assert eval_term(s, {"x": "a"}, t) is None  # f undefined at b


def test_eval_term_unbound_variable():
    s = small()
    assert eval_term(s, {}, Variable("y")) is None
    assert eval_term(s, {}, Constant("c")) == "b"


# --- insert_element ---------------------------------------------------------

def test_insert_is_isolated():
    s = make_structure(VF, ("a",), positive={"R": {("a", "a")}})
    s2, u = insert_element(s)
    assert u == "u0"
    assert s2.domain == ("a", "u0")
    assert s2.relations["R"].pos == {("a", "a")}
    assert s2.rel_status("R", ("a", "u0")) is RelStatus.UNDEFINED


def test_insert_into_empty_domain():
    s2, u = insert_element(PartialStructure())
    assert s2.domain == ("u0",)


def test_successive_inserts_are_distinct():
    s, u0 = insert_element(PartialStructure())
    s, u1 = insert_element(s)
    assert (u0, u1) == ("u0", "u1")


def test_insert_skips_taken_names():
    s = make_structure(Vocabulary(), ("u0",))
    s2, u = insert_element(s)
    assert u == "u1"


def test_insert_fresh_negative_flag():
    s = make_structure(VF, ("a",))
    s2, u = insert_element(s, fresh_negative=True)
    assert s2.rel_status("R", ("a", u)) is RelStatus.NEGATIVE
    assert s2.rel_status("R", (u, u)) is RelStatus.NEGATIVE
    assert s2.rel_status("R", ("a", "a")) is RelStatus.UNDEFINED


def test_insert_fresh_total_mode_is_negative_by_complement():
    v = Vocabulary((("T", 1, "declared"),))
    s = make_structure(v, ("a",), positive={"T": {("a",)}}, total={"T"})
    s2, u = insert_element(s)
    assert s2.rel_status("T", (u,)) is RelStatus.NEGATIVE


# --- delete_element ---------------------------------------------------------

def test_delete_cascades():
    s = small()
    s2 = delete_element(s, "b")
    assert s2.domain == ("a",)
    assert s2.relations["R"].pos == frozenset()
    assert s2.functions["f"].entries == ()
    assert s2.constants["c"] is None


def test_delete_only_element():
    s = make_structure(VF, ("a",), positive={"R": {("a", "a")}})
    s2 = delete_element(s, "a")
    assert s2.domain == ()
    assert s2.relations["R"].pos == frozenset()


def test_delete_unknown_element():
    with pytest.raises(ValueError):
        delete_element(small(), "zz")


# --- tuple mutations --------------------------------------------------------

def test_insert_tuple_overrides_any_status():
    s = make_structure(VF, ("a", "b"), negative={"R": {("b", "b")}})
    assert s.rel_status("R", ("a", "a")) is RelStatus.UNDEFINED
    s2 = insert_tuple(s, "R", ("a", "a"))
    assert s2.rel_status("R", ("a", "a")) is RelStatus.POSITIVE
    s3 = insert_tuple(s, "R", ("b", "b"))  # negative -> positive
    assert s3.rel_status("R", ("b", "b")) is RelStatus.POSITIVE
    s4 = insert_tuple(s3, "R", ("b", "b"))  # idempotent
    assert s4.rel_status("R", ("b", "b")) is RelStatus.POSITIVE
    assert s4 == s3


def test_delete_tuple_partial_mode():
    s = small()
    s2 = delete_tuple(s, "R", ("a", "b"))  # positive -> negative
    assert s2.rel_status("R", ("a", "b")) is RelStatus.NEGATIVE
    s3 = delete_tuple(s, "R", ("b", "a"))  # undefined -> negative
    assert s3.rel_status("R", ("b", "a")) is RelStatus.NEGATIVE


def test_delete_tuple_total_mode():
    v = Vocabulary((("T", 1, "declared"),))
    s = make_structure(v, ("a",), positive={"T": {("a",)}}, total={"T"})
    s2 = delete_tuple(s, "T", ("a",))
    assert s2.rel_status("T", ("a",)) is RelStatus.NEGATIVE
    assert s2.relations["T"].neg == frozenset()


def test_mutation_arity_and_domain_errors():
    s = small()
    with pytest.raises(ValueError):
        insert_tuple(s, "R", ("a",))
    with pytest.raises(ValueError):
        delete_tuple(s, "R", ("a", "zz"))
    with pytest.raises(ValueError):
        insert_tuple(s, "Q", ("a", "b"))


# --- model files ------------------------------------------------------------

MODEL = """
# a structure with one partial and one total relation
domain: a b
relation R/2 partial
  + (a,b)
  - (a,a)
relation S/1 total
  + (a)
function f/1:
  (a) -> b
constant c0 = a
constant c1 = undef
aux X/1
"""


def test_parse_model_statuses():
    vocab, s = parse_model(MODEL)
    assert s.rel_status("R", ("b", "b")) is RelStatus.UNDEFINED
    assert s.rel_status("R", ("a", "b")) is RelStatus.POSITIVE
    assert s.rel_status("S", ("b",)) is RelStatus.NEGATIVE  # total: unlisted
    assert s.functions["f"].mapping == {("a",): "b"}
    assert s.constants == {"c0": "a", "c1": None}
    assert vocab.relation_arity("X") == 1
    assert s.rel_status("X", ("a",)) is RelStatus.UNDEFINED


def test_parse_model_conflicting_tuple():
    bad = "domain: a\nrelation R/1 partial\n + (a)\n - (a)\n"
    with pytest.raises(ModelFormatError):
        parse_model(bad)


@pytest.mark.parametrize("bad", [
    "relation R/1 partial\n + (a)",        # missing domain
    "domain: a\nrelation R/1 partial\n + (b)",  # unknown element
    "domain: a\nrelation R/2 partial\n + (a)",  # arity mismatch
    "domain: a a",                          # duplicate element
    "domain: a\nrelation R/1 partial\nrelation R/1 total",  # duplicate symbol
    "domain: a\nnonsense here",
    "domain: a\naux X/1\n + (a)",           # tuple list outside a relation
    "domain: a\nconstant c = b",            # unknown element
])
def test_parse_model_errors(bad):
    with pytest.raises(ModelFormatError):
        parse_model(bad)


# --- encoding ---------------------------------------------------------------

def test_encode_examples():
    v = Vocabulary((("R", 1, "declared"),))
    s = make_structure(v, ("a", "b"), positive={"R": {("a",)}}, total={"R"})
    assert encode_model(s) == "n=2;R:1:+-;"
    assert encode_model(make_structure(v, ())) == "n=0;R:1:;"
    assert encode_model(make_structure(v, ("a",))) == "n=1;R:1:?;"


def test_encode_functions_and_constants():
    vocab, s = parse_model(MODEL)
    enc = encode_model(s)
    # relations in name order, then functions, then constants
    assert enc == ("n=2;"
                   "R:2:-+??;"
                   "S:1:+-;"
                   "X:1:??;"
                   "f:1:1:?;"
                   "c0:0:0;"
                   "c1:0:?;")


def test_encode_deterministic():
    vocab, s = parse_model(MODEL)
    assert encode_model(s) == encode_model(s)
    vocab2, s2 = parse_model(MODEL)
    assert encode_model(s) == encode_model(s2)


def test_encode_separates_statuses():
    v = Vocabulary((("R", 1, "declared"),))
    seen = {}
    for statuses in [("+",), ("-",), ("?",)]:
        pos = {"R": {("a",)} if statuses[0] == "+" else set()}
        neg = {"R": {("a",)} if statuses[0] == "-" else set()}
        s = make_structure(v, ("a",), pos, neg)
        enc = encode_model(s)
        assert enc not in seen.values()
        seen[statuses] = enc


# --- invariant fuzz ---------------------------------------------------------

def random_mutation_run(rng, steps=12):
    vocab = gen.rand_vocab(rng)
    s = gen.rand_structure(rng, vocab, 0, 3)
    history = [s]
    for _ in range(steps):
        snapshot_key = s.canonical_key
        op = rng.random()
        if op < 0.3:
            s2, u = insert_element(s, fresh_negative=rng.random() < 0.2)
            # isolation: the newcomer is nowhere positive, nowhere functional
            for rt in s2.relations.values():
                assert all(u not in t for t in rt.pos)
            for ft in s2.functions.values():
                assert all(u not in args and v != u for args, v in ft.entries)
            assert all(v != u for v in s2.constants.values())
        elif op < 0.5 and s.domain:
            s2 = delete_element(s, rng.choice(s.domain))
        elif op < 0.75 and s.domain:
            rel, rt = rng.choice(sorted(s.relations.items()))
            tup = tuple(rng.choice(s.domain) for _ in range(rt.arity))
            s2 = insert_tuple(s, rel, tup)
        elif s.domain:
            rel, rt = rng.choice(sorted(s.relations.items()))
            tup = tuple(rng.choice(s.domain) for _ in range(rt.arity))
            s2 = delete_tuple(s, rel, tup)
        else:
            continue
        # persistence: the input structure is untouched
        assert s.canonical_key == snapshot_key
        s = s2
        history.append(s)
        # structural invariants on the new value
        dom = set(s.domain)
        for rel, rt in s.relations.items():
            assert not (rt.pos & rt.neg)
            assert not (rt.total and rt.neg)
            for t in rt.pos | rt.neg:
                assert set(t) <= dom
        for fn, ft in s.functions.items():
            for args, v in ft.entries:
                assert set(args) <= dom and v in dom
        for v in s.constants.values():
            assert v is None or v in dom
    return history


def test_mutation_fuzz():
    rng = random.Random(2024)
    for _ in range(300):
        random_mutation_run(rng)


def test_cascade_completeness_direct():
    rng = random.Random(7)
    for _ in range(200):
        vocab = gen.rand_vocab(rng)
        s = gen.rand_structure(rng, vocab, 1, 4)
        victim = rng.choice(s.domain)
        s2 = delete_element(s, victim)
        assert victim not in s2.domain
        for rt in s2.relations.values():
            assert all(victim not in t for t in rt.pos | rt.neg)
        for ft in s2.functions.values():
            assert all(victim not in args and v != victim for args, v in ft.entries)
        assert all(v != victim for v in s2.constants.values())
