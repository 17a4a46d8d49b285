"""Canonical text form of AFDL formulas and queries.

Grammar (ASCII form; the Unicode symbols in parentheses are accepted too)::

    query    := "E_R" "(" formula ")"          (∃_R)
              | "A_R" "(" formula ")"          (∀_R)
              | "[[" formula "]]"              (⟦ ⟧)
              | formula
    formula  := disj [ "=>" formula ]          (⇒)   right-associative
    disj     := conj { "|" conj }              (∨)
    conj     := unary { "&" unary }            (∧)
    unary    := "!" unary | postfix            (¬)
    postfix  := primary { "[" pin { "," pin } "]" }
    pin      := IDENT "->" ("0" | "1")         (↦)
    primary  := IDENT | "MRS" "(" IDENT ")"
              | "VOT" ">=" INT "(" formula { "," formula } ")"   (≥)
              | "(" formula ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError, ParseError
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

# --- rendering --------------------------------------------------------------

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4, 5


def render_pins(pins: EvidenceMap) -> str:
    return "[" + ", ".join(f"{k} -> {int(v)}" for k, v in pins.items()) + "]"


def _render(f: Formula, ctx: int) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f.node, _PREC_ATOM
    if isinstance(f, MrsPred):
        return f"MRS({f.node})", _PREC_ATOM
    if isinstance(f, Vot):
        ops = ", ".join(_wrap(o, 0) for o in f.operands)
        return f"VOT>={f.k}({ops})", _PREC_ATOM
    if isinstance(f, Evidence):
        return _wrap(f.body, _PREC_ATOM) + render_pins(f.pins), _PREC_ATOM
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, _PREC_NOT), _PREC_NOT
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC_AND)} & {_wrap(f.right, _PREC_NOT)}", _PREC_AND
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC_OR)} | {_wrap(f.right, _PREC_AND)}", _PREC_OR
    if isinstance(f, Implies):
        return f"{_wrap(f.antecedent, _PREC_OR)} => {_wrap(f.consequent, _PREC_IMPLIES)}", _PREC_IMPLIES
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, ctx: int) -> str:
    text, prec = _render(f, ctx)
    return f"({text})" if prec < ctx else text


def render_formula(f: Formula) -> str:
    return _wrap(f, 0)


def render_query(q: Query) -> str:
    body = render_formula(q.body)
    if q.kind is QueryKind.QQ_EXISTS:
        return f"E_R({body})"
    if q.kind is QueryKind.QQ_FORALL:
        return f"A_R({body})"
    if q.kind is QueryKind.SSQ:
        return f"[[{body}]]"
    return body


# --- lexing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<exists>E_R\b|∃_R|∃)
  | (?P<forall>A_R\b|∀_R|∀)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<arrow>->|↦)
  | (?P<implies>=>|⇒)
  | (?P<ge>>=|≥)
  | (?P<not>!|¬|~)
  | (?P<and>&|∧)
  | (?P<or>\||∨)
  | (?P<llbrack>⟦)
  | (?P<rrbrack>⟧)
  | (?P<punct>[()\[\],])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise LexError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "punct":
                kind = tok
            elif kind == "llbrack":
                kind, tok = "[", "["
                out.append(_Tok(kind, tok, line, pos - line_start + 1))
            elif kind == "rrbrack":
                kind, tok = "]", "]"
                out.append(_Tok(kind, tok, line, pos - line_start + 1))
            out.append(_Tok(kind, tok, line, pos - line_start + 1))
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


# --- parsing ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> _Tok:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def take(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise ParseError(tok.line, tok.col, f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def accept(self, kind: str, text: str | None = None) -> bool:
        if self.tok.kind == kind and (text is None or self.tok.text == text):
            self.i += 1
            return True
        return False

    def query(self) -> tuple[QueryKind, Formula]:
        if self.accept("exists"):
            kind = QueryKind.QQ_EXISTS
        elif self.accept("forall"):
            kind = QueryKind.QQ_FORALL
        elif self.tok.kind == "[" and self.peek().kind == "[":
            self.i += 2
            body = self.formula()
            self.take("]")
            self.take("]")
            self.take("eof")
            return QueryKind.SSQ, body
        else:
            body = self.formula()
            self.take("eof")
            return QueryKind.BQ, body
        self.take("(")
        body = self.formula()
        self.take(")")
        self.take("eof")
        return kind, body

    def formula(self) -> Formula:
        left = self.disj()
        if self.accept("implies"):
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("or"):
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.accept("and"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("not"):
            return Not(self.unary())
        f = self.primary()
        while self.tok.kind == "[":
            f = Evidence(f, self.pins())
        return f

    def pins(self) -> EvidenceMap:
        self.take("[")
        items: dict[str, bool] = {}
        while True:
            name = self.take("ident")
            self.take("arrow")
            val = self.take("int")
            if val.text not in ("0", "1"):
                raise ParseError(val.line, val.col, "evidence values must be 0 or 1")
            if name.text in items:
                raise ParseError(name.line, name.col, f"{name.text} pinned twice")
            items[name.text] = val.text == "1"
            if not self.accept(","):
                break
        self.take("]")
        return EvidenceMap(items)

    def primary(self) -> Formula:
        tok = self.tok
        if self.accept("("):
            f = self.formula()
            self.take(")")
            return f
        if tok.kind == "ident" and tok.text == "MRS" and self.peek().kind == "(":
            self.i += 2
            node = self.take("ident").text
            self.take(")")
            return MrsPred(node)
        if tok.kind == "ident" and tok.text == "VOT" and self.peek().kind == "ge":
            self.i += 2
            k_tok = self.take("int")
            self.take("(")
            ops = [self.formula()]
            while self.accept(","):
                ops.append(self.formula())
            self.take(")")
            k = int(k_tok.text)
            if not 1 <= k <= len(ops):
                raise ParseError(k_tok.line, k_tok.col, f"VOT>={k} over {len(ops)} operands")
            return Vot(k, tuple(ops))
        if tok.kind == "ident":
            self.i += 1
            return Atom(tok.text)
        raise ParseError(tok.line, tok.col, f"expected a formula, got {tok.text or 'end of input'!r}")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.take("eof")
    return f


def parse_afdl_query(text: str, policy: Policy = Policy.ATTACK_FAULT_ONLY) -> Query:
    kind, body = _Parser(text).query()
    if kind is QueryKind.SSQ:
        try:
            return Query(kind, body, policy)
        except ValueError as exc:
            raise ParseError(1, 1, str(exc)) from None
    return Query(kind, body, policy)
