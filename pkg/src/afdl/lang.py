"""LangAFDL: a template language compiled to AFDL queries.

A query file has an optional ``assume:`` block and one action block::

    assume:
        @AI: set GO = 1
        set Vot[JCO_1, JCO_2, JCO_3] >= 1; set HE = 1
    check:
        MRS[US] and @AI(not US)

Undecorated ``set X = v`` statements become evidence over the whole
property; ``@NAME:`` statements become evidence on ``@NAME(...)`` sub-
expressions only; ``set Vot[...] >= k`` becomes the antecedent of an
implication. ``check: exists e`` / ``check: forall e`` give quantified
queries, a bare ``check: e`` a Boolean query, and ``computeall: MRS(x)`` a
minimal-risk-scenario query.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    LexError,
    MultipleActions,
    NestedQuantifier,
    ParseError,
    TranslationError,
    UndeclaredDecorator,
    UnknownDecoratorSyntax,
    UnknownIdentifier,
)
from .logic import (
    And,
    Atom,
    Evidence,
    EvidenceMap,
    Formula,
    Implies,
    MrsPred,
    Not,
    Or,
    Policy,
    Query,
    QueryKind,
    Vot,
)
from .model import Afdt


class TokenKind(Enum):
    KW_ASSUME = "assume"
    KW_CHECK = "check"
    KW_COMPUTEALL = "computeall"
    KW_SET = "set"
    KW_EXISTS = "exists"
    KW_FORALL = "forall"
    KW_NOT = "not"
    KW_AND = "and"
    KW_OR = "or"
    KW_VOT = "Vot"
    KW_MRS = "MRS"
    AT = "@"
    IDENT = "identifier"
    INT = "integer"
    EQ = "="
    GE = ">="
    SEMI = ";"
    COLON = ":"
    COMMA = ","
    LPAREN = "("
    RPAREN = ")"
    LBRACK = "["
    RBRACK = "]"
    EOF = "end of input"


_KEYWORDS = {k.value: k for k in TokenKind if k.name.startswith("KW_")}
_SYMBOLS = {
    "@": TokenKind.AT,
    "=": TokenKind.EQ,
    ">=": TokenKind.GE,
    "≥": TokenKind.GE,
    ";": TokenKind.SEMI,
    ":": TokenKind.COLON,
    ",": TokenKind.COMMA,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACK,
    "]": TokenKind.RBRACK,
}
_LEX_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<sym>>=|[@=≥;:,()\[\]])"
)


@dataclass(frozen=True)
class LangToken:
    kind: TokenKind
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[LangToken]:
    """Token stream with 1-based positions; ends with an EOF token."""
    out: list[LangToken] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _LEX_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise LexError(line, col, f"unexpected character {text[pos]!r}")
        word = m.group()
        if m.lastgroup == "word":
            out.append(LangToken(_KEYWORDS.get(word, TokenKind.IDENT), word, line, col))
        elif m.lastgroup == "int":
            out.append(LangToken(TokenKind.INT, word, line, col))
        elif m.lastgroup == "sym":
            out.append(LangToken(_SYMBOLS[word], word, line, col))
        newlines = word.count("\n")
        if newlines:
            line += newlines
            line_start = pos + word.rindex("\n") + 1
        pos = m.end()
    out.append(LangToken(TokenKind.EOF, "", line, pos - line_start + 1))
    return out


# --- syntax tree ------------------------------------------------------------


@dataclass(frozen=True)
class SetPin:
    target: str
    value: bool


@dataclass(frozen=True)
class SetVot:
    k: int
    operands: tuple[str, ...]


@dataclass(frozen=True)
class Assumption:
    body: SetPin | SetVot
    decorator: str | None = None


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class NotExpr:
    operand: "LangExpr"


@dataclass(frozen=True)
class AndExpr:
    left: "LangExpr"
    right: "LangExpr"


@dataclass(frozen=True)
class OrExpr:
    left: "LangExpr"
    right: "LangExpr"


@dataclass(frozen=True)
class Exists:
    body: "LangExpr"


@dataclass(frozen=True)
class Forall:
    body: "LangExpr"


@dataclass(frozen=True)
class Mrs:
    node: str


@dataclass(frozen=True)
class DecoratorApply:
    name: str
    body: "LangExpr"


LangExpr = Ident | NotExpr | AndExpr | OrExpr | Exists | Forall | Mrs | DecoratorApply


class Action(Enum):
    CHECK = "check"
    COMPUTEALL = "computeall"


@dataclass(frozen=True)
class LangAst:
    action: Action
    expression: LangExpr
    assumptions: tuple[Assumption, ...] = field(default=())


# --- parser -----------------------------------------------------------------

K = TokenKind


class _Parser:
    def __init__(self, tokens: list[LangToken]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> LangToken:
        return self.toks[self.i]

    def next_is(self, *kinds: TokenKind) -> bool:
        return self.tok.kind in kinds

    def take(self, *kinds: TokenKind) -> LangToken:
        tok = self.tok
        if tok.kind not in kinds:
            want = " or ".join(repr(k.value) for k in kinds)
            got = repr(tok.text) if tok.text else "end of input"
            raise ParseError(tok.line, tok.col, f"expected {want}, got {got}")
        self.i += 1
        return tok

    def accept(self, kind: TokenKind) -> bool:
        if self.tok.kind is kind:
            self.i += 1
            return True
        return False

    def query(self) -> LangAst:
        assumptions: list[Assumption] = []
        if self.accept(K.KW_ASSUME):
            self.take(K.COLON)
            assumptions.append(self.assumption())
            while True:
                if self.accept(K.SEMI):
                    if self.next_is(K.KW_SET, K.AT):
                        assumptions.append(self.assumption())
                        continue
                    break
                prev = self.toks[self.i - 1]
                if self.next_is(K.KW_SET, K.AT) and self.tok.line > prev.line:
                    assumptions.append(self.assumption())
                    continue
                break
        head = self.take(K.KW_CHECK, K.KW_COMPUTEALL)
        self.take(K.COLON)
        expr = self.expr(top=True)
        if self.next_is(K.KW_CHECK, K.KW_COMPUTEALL, K.KW_ASSUME):
            raise MultipleActions(self.tok.line, self.tok.col, "a query has exactly one action block")
        self.take(K.EOF)
        action = Action.CHECK if head.kind is K.KW_CHECK else Action.COMPUTEALL
        return LangAst(action, expr, tuple(assumptions))

    def assumption(self) -> Assumption:
        decorator = None
        if self.accept(K.AT):
            decorator = self.take(K.IDENT).text
            self.take(K.COLON)
            if not self.next_is(K.KW_SET):
                raise UnknownDecoratorSyntax(self.tok.line, self.tok.col, "a decorator prefix must be followed by 'set'")
        self.take(K.KW_SET)
        if self.next_is(K.KW_VOT):
            vot_tok = self.take(K.KW_VOT)
            if decorator is not None:
                raise UnknownDecoratorSyntax(vot_tok.line, vot_tok.col, "Vot assumptions cannot be decorated")
            self.take(K.LBRACK)
            names = [self.take(K.IDENT).text]
            while self.accept(K.COMMA):
                names.append(self.take(K.IDENT).text)
            self.take(K.RBRACK)
            self.take(K.GE)
            k_tok = self.take(K.INT)
            k = int(k_tok.text)
            if not 1 <= k <= len(names):
                raise ParseError(k_tok.line, k_tok.col, f"Vot threshold {k} outside 1..{len(names)}")
            return Assumption(SetVot(k, tuple(names)))
        target = self.take(K.IDENT).text
        self.take(K.EQ)
        val = self.take(K.INT)
        if val.text not in ("0", "1"):
            raise ParseError(val.line, val.col, "set values must be 0 or 1")
        return Assumption(SetPin(target, val.text == "1"), decorator)

    def expr(self, top: bool = False) -> LangExpr:
        if self.next_is(K.KW_EXISTS, K.KW_FORALL):
            tok = self.tok
            if not top:
                raise NestedQuantifier(tok.line, tok.col, "quantifiers may only appear outermost")
            self.i += 1
            body = self.expr()
            return Exists(body) if tok.kind is K.KW_EXISTS else Forall(body)
        return self.or_expr()

    def or_expr(self) -> LangExpr:
        e = self.and_expr()
        while self.accept(K.KW_OR):
            e = OrExpr(e, self.and_expr())
        return e

    def and_expr(self) -> LangExpr:
        e = self.unary()
        while self.accept(K.KW_AND):
            e = AndExpr(e, self.unary())
        return e

    def unary(self) -> LangExpr:
        tok = self.tok
        if self.accept(K.KW_NOT):
            return NotExpr(self.unary())
        if self.accept(K.AT):
            name = self.take(K.IDENT).text
            if not self.next_is(K.LPAREN):
                raise UnknownDecoratorSyntax(self.tok.line, self.tok.col, f"expected '(' after @{name}")
            self.take(K.LPAREN)
            body = self.expr()
            self.take(K.RPAREN)
            return DecoratorApply(name, body)
        if self.accept(K.KW_MRS):
            close = K.RPAREN if self.take(K.LPAREN, K.LBRACK).kind is K.LPAREN else K.RBRACK
            node = self.take(K.IDENT).text
            self.take(close)
            return Mrs(node)
        if self.accept(K.LPAREN):
            e = self.expr()
            self.take(K.RPAREN)
            return e
        if self.next_is(K.KW_EXISTS, K.KW_FORALL):
            raise NestedQuantifier(tok.line, tok.col, "quantifiers may only appear outermost")
        return Ident(self.take(K.IDENT).text)


def parse_query(tokens: list[LangToken] | str) -> LangAst:
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return _Parser(tokens).query()


# --- translation --------------------------------------------------------------


def _merge(into: dict[str, bool], pin: SetPin, where: str) -> None:
    if into.get(pin.target, pin.value) != pin.value:
        raise TranslationError(f"{pin.target} is set to both 0 and 1 in {where}")
    into[pin.target] = pin.value


def translate(ast: LangAst, t: Afdt, policy: Policy = Policy.ATTACK_FAULT_ONLY) -> Query:
    def resolve(name: str) -> str:
        if name not in t.nodes:
            raise UnknownIdentifier(name)
        return name

    global_pins: dict[str, bool] = {}
    decorators: dict[str, dict[str, bool]] = {}
    vots: list[SetVot] = []
    for a in ast.assumptions:
        body = a.body
        if isinstance(body, SetVot):
            for v in body.operands:
                resolve(v)
            vots.append(body)
        elif a.decorator is None:
            resolve(body.target)
            _merge(global_pins, body, "the global assumptions")
        else:
            resolve(body.target)
            _merge(decorators.setdefault(a.decorator, {}), body, f"@{a.decorator}")

    def tr(e: LangExpr) -> Formula:
        if isinstance(e, Ident):
            return Atom(resolve(e.name))
        if isinstance(e, Mrs):
            return MrsPred(resolve(e.node))
        if isinstance(e, NotExpr):
            return Not(tr(e.operand))
        if isinstance(e, AndExpr):
            return And(tr(e.left), tr(e.right))
        if isinstance(e, OrExpr):
            return Or(tr(e.left), tr(e.right))
        if isinstance(e, DecoratorApply):
            if e.name not in decorators:
                raise UndeclaredDecorator(e.name)
            return Evidence(tr(e.body), EvidenceMap(decorators[e.name]))
        raise TranslationError(f"cannot translate {e!r}")

    expr = ast.expression
    kind = QueryKind.BQ
    if isinstance(expr, Exists):
        kind, expr = QueryKind.QQ_EXISTS, expr.body
    elif isinstance(expr, Forall):
        kind, expr = QueryKind.QQ_FORALL, expr.body

    if ast.action is Action.COMPUTEALL:
        if kind is not QueryKind.BQ:
            raise TranslationError("computeall takes MRS(node), not a quantified property")
        if vots:
            raise TranslationError("Vot assumptions need a check: block")
        kind = QueryKind.SSQ

    body = tr(expr)
    for v in reversed(vots):
        body = Implies(Vot(v.k, tuple(Atom(x) for x in v.operands)), body)
    if global_pins:
        body = Evidence(body, EvidenceMap(global_pins))
    try:
        return Query(kind, body, policy)
    except ValueError as exc:
        raise TranslationError(f"computeall: {exc}") from None


def compile_lang(text: str, t: Afdt, policy: Policy = Policy.ATTACK_FAULT_ONLY) -> Query:
    return translate(parse_query(tokenize(text)), t, policy)
