"""Graphviz rendering of an AFDT."""

from __future__ import annotations

from .model import Afdt, NodeType

_LEAF_STYLE = {
    NodeType.BAS: ('ellipse', '#f4cccc', 'BAS'),
    NodeType.BCF: ('circle', '#fce5cd', 'BCF'),
    NodeType.BDS: ('box', '#d9ead3', 'BDS'),
}


def _q(s: str) -> str:
    return '"' + s.replace('\\', '\\\\').replace('"', '\\"').replace('\n', '\\n') + '"'


def export_dot(t: Afdt) -> str:
    """DOT digraph; child edges solid, counter edges dashed. Output is deterministic."""
    out = [f"digraph {_q(t.name)} {{", "  rankdir=TB;", '  node [fontname="Helvetica"];']
    for v in sorted(t.nodes):
        node = t.nodes[v]
        if node.is_leaf:
            shape, fill, tag = _LEAF_STYLE[node.type]
            attrs = f'shape={shape}, style=filled, fillcolor="{fill}"'
        else:
            tag = node.describe().upper()
            attrs = "shape=invtrapezium"
        if v == t.toplevel:
            attrs += ", penwidth=2"
        label = _q(f"{v}\n{tag}")
        out.append(f"  {_q(v)} [label={label}, {attrs}];")
    for v in sorted(t.nodes):
        node = t.nodes[v]
        for c in node.children:
            out.append(f"  {_q(v)} -> {_q(c)};")
        for c in node.counters:
            out.append(f"  {_q(v)} -> {_q(c)} [style=dashed, arrowhead=odot];")
    out.append("}")
    return "\n".join(out) + "\n"
