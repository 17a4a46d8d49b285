import pytest

from afdl import (
    And,
    Atom,
    Evidence,
    EvidenceMap,
    Implies,
    LexError,
    MrsPred,
    NestedQuantifier,
    Not,
    ParseError,
    QueryKind,
    TranslationError,
    UndeclaredDecorator,
    UnknownIdentifier,
    Vot,
    compile_lang,
    parse_afdt_text,
    parse_query,
    tokenize,
)
from afdl.errors import MultipleActions, UnknownDecoratorSyntax
from afdl.lang import (
    Action,
    AndExpr,
    Assumption,
    DecoratorApply,
    Exists,
    Ident,
    Mrs,
    NotExpr,
    SetPin,
    SetVot,
    TokenKind,
)

K = TokenKind


@pytest.fixture
def small():
    return parse_afdt_text(
        "afdt s\ntoplevel T\nleaf a bas\nleaf b bcf\nleaf c bas\nleaf d bds\ngate G and a b\ngate T or G c\ncounter G d\n"
    )


# --- lexer -------------------------------------------------------------------


def test_tokenize_set():
    toks = tokenize("set GO = 0")
    assert [(t.kind, t.text) for t in toks] == [
        (K.KW_SET, "set"),
        (K.IDENT, "GO"),
        (K.EQ, "="),
        (K.INT, "0"),
        (K.EOF, ""),
    ]


def test_tokenize_unicode_ge():
    kinds = [t.kind for t in tokenize("Vot[a, b] ≥ 1")]
    assert kinds == [K.KW_VOT, K.LBRACK, K.IDENT, K.COMMA, K.IDENT, K.RBRACK, K.GE, K.INT, K.EOF]
    assert [t.kind for t in tokenize("Vot[a] >= 1")][4] is K.GE


def test_tokenize_positions_and_comments():
    toks = tokenize("assume: # note\n  set x = 1")
    set_tok = toks[2]
    assert (set_tok.kind, set_tok.line, set_tok.col) == (K.KW_SET, 2, 3)


def test_keywords_are_case_sensitive():
    assert tokenize("Exists")[0].kind is K.IDENT
    assert tokenize("vot")[0].kind is K.IDENT


def test_lex_error():
    with pytest.raises(LexError) as exc:
        tokenize("check: a $ b")
    assert (exc.value.line, exc.value.col) == (1, 10)


# --- parser ---------------------------------------------------------------------


def test_parse_global_pins():
    ast = parse_query("assume:\n    set GO = 0; set HE = 1\ncheck:\n    exists CE\n")
    assert ast.action is Action.CHECK
    assert ast.assumptions == (Assumption(SetPin("GO", False)), Assumption(SetPin("HE", True)))
    assert ast.expression == Exists(Ident("CE"))


def test_parse_newline_separated_assumptions():
    ast = parse_query("assume:\n  set a = 1\n  set b = 0\ncheck: a")
    assert len(ast.assumptions) == 2


def test_parse_decorator():
    ast = parse_query("assume:\n    @AI: set GO = 1\ncheck:\n    MRS[US] and @AI(not US)\n")
    assert ast.assumptions == (Assumption(SetPin("GO", True), "AI"),)
    assert ast.expression == AndExpr(Mrs("US"), DecoratorApply("AI", NotExpr(Ident("US"))))


def test_parse_vot_assumption():
    ast = parse_query("assume: set Vot[a, b, c] ≥ 2\ncheck: forall T")
    assert ast.assumptions[0].body == SetVot(2, ("a", "b", "c"))


def test_parse_without_assumptions():
    ast = parse_query("computeall: MRS(T)")
    assert ast.action is Action.COMPUTEALL and ast.assumptions == ()


def test_precedence_not_and_or():
    ast = parse_query("check: not a and b or c")
    assert ast.expression.__class__.__name__ == "OrExpr"
    assert ast.expression.left == AndExpr(NotExpr(Ident("a")), Ident("b"))


def test_nested_quantifier_rejected():
    with pytest.raises(NestedQuantifier):
        parse_query("check: a and exists b")
    with pytest.raises(NestedQuantifier):
        parse_query("check: exists forall a")


def test_decorated_vot_rejected():
    with pytest.raises(UnknownDecoratorSyntax):
        parse_query("assume: @D: set Vot[a, b] >= 1\ncheck: a")


def test_multiple_actions_rejected():
    with pytest.raises(MultipleActions):
        parse_query("check: a\ncheck: b")


@pytest.mark.parametrize(
    "text",
    [
        "check:",
        "assume: set a = 2\ncheck: a",
        "assume: set Vot[a, b] >= 3\ncheck: a",
        "assume: set a 1\ncheck: a",
        "check: (a",
        "exists a",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_query(text)


# --- translation --------------------------------------------------------------------


def test_translate_global_pins(small):
    q = compile_lang("assume: set d = 0; set c = 0\ncheck: exists T", small)
    assert q.kind is QueryKind.QQ_EXISTS
    assert q.body == Evidence(Atom("T"), EvidenceMap({"d": False, "c": False}))


def test_translate_bq_without_pins(small):
    q = compile_lang("check: T and not G", small)
    assert q.kind is QueryKind.BQ
    assert q.body == And(Atom("T"), Not(Atom("G")))


def test_translate_vot_becomes_antecedent(small):
    q = compile_lang("assume: set Vot[a, c] >= 1; set Vot[a, b] >= 2\ncheck: forall T", small)
    inner = Implies(Vot(2, (Atom("a"), Atom("b"))), Atom("T"))
    assert q.body == Implies(Vot(1, (Atom("a"), Atom("c"))), inner)


def test_translate_vot_inside_global_pins(small):
    q = compile_lang("assume: set Vot[a, c] >= 1; set d = 1\ncheck: forall T", small)
    assert q.body == Evidence(Implies(Vot(1, (Atom("a"), Atom("c"))), Atom("T")), EvidenceMap({"d": True}))


def test_translate_decorator_scopes_subtree(small):
    q = compile_lang("assume: @X: set d = 1\ncheck: MRS(T) and @X(not T)", small)
    assert q.body == And(MrsPred("T"), Evidence(Not(Atom("T")), EvidenceMap({"d": True})))


def test_translate_computeall(small):
    q = compile_lang("assume: set d = 0\ncomputeall: MRS(T)", small)
    assert q.kind is QueryKind.SSQ
    assert q.body == Evidence(MrsPred("T"), EvidenceMap({"d": False}))


def test_unknown_identifier(small):
    with pytest.raises(UnknownIdentifier):
        compile_lang("check: exists nope", small)
    with pytest.raises(UnknownIdentifier):
        compile_lang("assume: set nope = 1\ncheck: T", small)


def test_undeclared_decorator(small):
    with pytest.raises(UndeclaredDecorator):
        compile_lang("check: @AI(T)", small)


def test_conflicting_pins(small):
    with pytest.raises(TranslationError):
        compile_lang("assume: set a = 1; set a = 0\ncheck: T", small)


def test_computeall_needs_mrs(small):
    with pytest.raises(TranslationError):
        compile_lang("computeall: T", small)
    with pytest.raises(TranslationError):
        compile_lang("computeall: exists MRS(T)", small)
