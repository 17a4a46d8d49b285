"""Reading and writing the line-oriented ``.afdt`` format.

::

    afdt <name>
    toplevel <id>
    leaf <id> bas|bcf|bds
    gate <id> and|or|vot<k> <child-id> ...
    counter <node-id> <counter-node-id>

``#`` starts a comment. Statements may appear in any order.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import AfdtSyntaxError
from .model import (
    IDENT_RE,
    Afdt,
    CounterDecl,
    Declaration,
    GateDecl,
    LeafDecl,
    NodeType,
    build_afdt,
)

_LEAF_TYPES = {"bas": NodeType.BAS, "bcf": NodeType.BCF, "bds": NodeType.BDS}
_VOT_RE = re.compile(r"vot(\d+)\Z")


def _tokens(line: str) -> list[tuple[int, str]]:
    """Whitespace-separated tokens with 1-based columns."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def parse_afdt_text(text: str) -> Afdt:
    name: str | None = None
    toplevel: str | None = None
    decls: list[Declaration] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        (col, kw), rest = toks[0], toks[1:]

        def need(n: int, what: str) -> None:
            if len(rest) != n:
                at = rest[n][0] if len(rest) > n else len(line) + 1
                raise AfdtSyntaxError(lineno, at, f"'{kw}' expects {what}")

        def ident(i: int) -> str:
            c, word = rest[i]
            if not IDENT_RE.match(word):
                raise AfdtSyntaxError(lineno, c, f"{word!r} is not a valid identifier")
            return word

        if kw == "afdt":
            need(1, "a model name")
            if name is not None:
                raise AfdtSyntaxError(lineno, col, "duplicate 'afdt' header")
            name = rest[0][1]
        elif kw == "toplevel":
            need(1, "one node id")
            if toplevel is not None:
                raise AfdtSyntaxError(lineno, col, "duplicate 'toplevel' statement")
            toplevel = ident(0)
        elif kw == "leaf":
            need(2, "an id and one of bas|bcf|bds")
            c, dom = rest[1]
            if dom not in _LEAF_TYPES:
                raise AfdtSyntaxError(lineno, c, f"unknown leaf domain {dom!r}")
            decls.append(LeafDecl(ident(0), _LEAF_TYPES[dom], lineno))
        elif kw == "gate":
            if len(rest) < 3:
                at = rest[-1][0] if rest else col
                raise AfdtSyntaxError(lineno, at, "'gate' expects an id, a type and at least one child")
            c, op = rest[1]
            m = _VOT_RE.match(op)
            if op in ("and", "or"):
                gtype, k = NodeType(op), 0
            elif m:
                gtype, k = NodeType.VOT, int(m.group(1))
            else:
                raise AfdtSyntaxError(lineno, c, f"unknown gate type {op!r}")
            children = tuple(ident(i) for i in range(2, len(rest)))
            decls.append(GateDecl(ident(0), gtype, children, k, lineno))
        elif kw == "counter":
            need(2, "a host id and a counter id")
            decls.append(CounterDecl(ident(0), ident(1), lineno))
        else:
            raise AfdtSyntaxError(lineno, col, f"unknown statement {kw!r}")

    if name is None:
        raise AfdtSyntaxError(1, 1, "missing 'afdt <name>' header")
    if toplevel is None:
        raise AfdtSyntaxError(1, 1, "missing 'toplevel <id>' statement")
    return build_afdt(name, decls, toplevel)


def load_afdt(path: str | Path) -> Afdt:
    return parse_afdt_text(Path(path).read_text(encoding="utf-8"))


def serialize_afdt(t: Afdt) -> str:
    lines = [f"afdt {t.name}", f"toplevel {t.toplevel}"]
    counters = []
    for node in t.nodes.values():
        if node.is_leaf:
            lines.append(f"leaf {node.id} {node.type.value}")
        else:
            lines.append(f"gate {node.id} {node.describe()} {' '.join(node.children)}")
        counters.extend(f"counter {node.id} {c}" for c in node.counters)
    return "\n".join(lines + counters) + "\n"
