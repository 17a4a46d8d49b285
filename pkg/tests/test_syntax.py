import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afdl import (
    And,
    Atom,
    Evidence,
    EvidenceMap,
    Implies,
    MrsPred,
    Not,
    Or,
    ParseError,
    Policy,
    Query,
    QueryKind,
    Vot,
    parse_afdl_query,
    parse_formula,
    render_formula,
    render_query,
)
from afdl.errors import LexError
from afdl.logic import normalize
from gen import random_formula, random_tree

a, b, c = Atom("a"), Atom("b"), Atom("c")


@pytest.mark.parametrize(
    "f, text",
    [
        (And(a, Or(b, c)), "a & (b | c)"),
        (Or(And(a, b), c), "a & b | c"),
        (Implies(a, Implies(b, c)), "a => b => c"),
        (Implies(Implies(a, b), c), "(a => b) => c"),
        (Not(And(a, b)), "!(a & b)"),
        (Evidence(Not(a), EvidenceMap({"b": True})), "(!a)[b -> 1]"),
        (Not(Evidence(a, EvidenceMap({"b": True}))), "!a[b -> 1]"),
        (Vot(2, (a, b, c)), "VOT>=2(a, b, c)"),
        (MrsPred("T"), "MRS(T)"),
    ],
)
def test_render(f, text):
    assert render_formula(f) == text
    assert parse_formula(text) == f


def test_render_queries():
    assert render_query(Query(QueryKind.QQ_EXISTS, a)) == "E_R(a)"
    assert render_query(Query(QueryKind.QQ_FORALL, a)) == "A_R(a)"
    assert render_query(Query(QueryKind.BQ, a)) == "a"
    ssq = Query(QueryKind.SSQ, Evidence(MrsPred("T"), EvidenceMap({"x": False})))
    assert render_query(ssq) == "[[MRS(T)[x -> 0]]]"


def test_unicode_alternates():
    assert parse_formula("¬a ∧ b ∨ c") == parse_formula("!a & b | c")
    assert parse_formula("a ⇒ b[c ↦ 1]") == parse_formula("a => b[c -> 1]")
    assert parse_afdl_query("⟦MRS(T)⟧").kind is QueryKind.SSQ
    assert parse_afdl_query("∃_R(a)").kind is QueryKind.QQ_EXISTS
    assert parse_afdl_query("∀_R(a)").kind is QueryKind.QQ_FORALL


def test_query_policy_carried():
    q = parse_afdl_query("E_R(a)", Policy.ALL_DOMAINS)
    assert q.policy is Policy.ALL_DOMAINS


@pytest.mark.parametrize("text", ["a &", "(a", "a[b -> 2]", "VOT>=0(a)", "VOT>=3(a, b)", "E_R(a) b", "[[a]]"])
def test_parse_errors(text):
    with pytest.raises((ParseError, ValueError)):
        parse_afdl_query(text)


def test_lex_error():
    with pytest.raises(LexError):
        parse_formula("a $ b")


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_render_parse_roundtrip(rng):
    t = random_tree(rng, max_leaves=6)
    f = random_formula(rng, t, depth=4, allow_mrs=True)
    text = render_formula(f)
    assert normalize(parse_formula(text)) == normalize(f)
    assert render_formula(parse_formula(text)) == text
