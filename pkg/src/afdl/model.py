"""Attack-fault-defense trees: node types, validation and the structure function."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import Diagnostic, UnknownNode, ValidationError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class NodeType(Enum):
    BAS = "bas"
    BCF = "bcf"
    BDS = "bds"
    AND = "and"
    OR = "or"
    VOT = "vot"

    @property
    def is_leaf(self) -> bool:
        return self in LEAF_TYPES


LEAF_TYPES = frozenset({NodeType.BAS, NodeType.BCF, NodeType.BDS})
# Leaf domains double as node types; these aliases read better at call sites.
LeafDomain = NodeType
ATTACK, FAULT, DEFENSE = NodeType.BAS, NodeType.BCF, NodeType.BDS


@dataclass(frozen=True)
class Node:
    id: str
    type: NodeType
    children: tuple[str, ...] = ()
    k: int = 0
    counters: tuple[str, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.type.is_leaf

    @property
    def threshold(self) -> int:
        """Number of true children the gate needs."""
        if self.type is NodeType.AND:
            return len(self.children)
        if self.type is NodeType.OR:
            return 1
        return self.k

    def describe(self) -> str:
        if self.type is NodeType.VOT:
            return f"vot{self.k}"
        return self.type.value


# --- declarations -----------------------------------------------------------


@dataclass(frozen=True)
class LeafDecl:
    id: str
    domain: NodeType
    line: int | None = None


@dataclass(frozen=True)
class GateDecl:
    id: str
    type: NodeType
    children: tuple[str, ...]
    k: int = 0
    line: int | None = None


@dataclass(frozen=True)
class CounterDecl:
    host: str
    counter: str
    line: int | None = None


Declaration = LeafDecl | GateDecl | CounterDecl


# --- the tree ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Afdt:
    """An immutable, validated AFDT. Build one with :func:`build_afdt`."""

    name: str
    nodes: Mapping[str, Node]
    toplevel: str
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        leaves = tuple(sorted(n.id for n in self.nodes.values() if n.is_leaf))
        object.__setattr__(self, "_leaves", leaves)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Afdt):
            return NotImplemented
        return (
            self.name == other.name
            and self.toplevel == other.toplevel
            and dict(self.nodes) == dict(other.nodes)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.toplevel, frozenset(self.nodes.items())))

    def __reduce__(self):
        return Afdt, (self.name, dict(self.nodes), self.toplevel, self.warnings)

    def __getitem__(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def __contains__(self, node_id: object) -> bool:
        return node_id in self.nodes

    @property
    def leaves(self) -> tuple[str, ...]:
        """Leaf ids in lexicographic order."""
        return self._leaves  # type: ignore[attr-defined]

    def leaves_of(self, *domains: NodeType) -> tuple[str, ...]:
        return tuple(v for v in self.leaves if self.nodes[v].type in domains)

    def domain(self, leaf: str) -> NodeType:
        node = self[leaf]
        if not node.is_leaf:
            raise ValueError(f"{leaf!r} is a gate, not a leaf")
        return node.type

    def scenario(self, active: Iterable[str] = ()) -> "RiskScenario":
        return RiskScenario.of(self, active)


@dataclass(frozen=True)
class RiskScenario:
    """A risk state vector: the activated attack steps, failures and defenses."""

    attacks: frozenset[str] = frozenset()
    faults: frozenset[str] = frozenset()
    defenses: frozenset[str] = frozenset()

    @classmethod
    def of(cls, t: Afdt, active: Iterable[str]) -> "RiskScenario":
        parts: dict[NodeType, set[str]] = {ATTACK: set(), FAULT: set(), DEFENSE: set()}
        for v in active:
            node = t[v]
            if not node.is_leaf:
                raise ValueError(f"scenario member {v!r} is not a leaf")
            parts[node.type].add(v)
        return cls(frozenset(parts[ATTACK]), frozenset(parts[FAULT]), frozenset(parts[DEFENSE]))

    @property
    def active(self) -> frozenset[str]:
        return self.attacks | self.faults | self.defenses

    def sorted_ids(self) -> list[str]:
        return sorted(self.active)

    def __len__(self) -> int:
        return len(self.attacks) + len(self.faults) + len(self.defenses)

    def __str__(self) -> str:
        return "{" + ", ".join(self.sorted_ids()) + "}"


def scenario_key(ids: Iterable[str]) -> tuple[int, tuple[str, ...]]:
    """Sort key: cardinality first, then lexicographic on the sorted ids."""
    ordered = tuple(sorted(ids))
    return len(ordered), ordered


# --- construction -----------------------------------------------------------


def build_afdt(name: str, declarations: Iterable[Declaration], toplevel: str) -> Afdt:
    """Validate declarations and assemble an :class:`Afdt`.

    Raises :class:`ValidationError` carrying every diagnostic found. Warnings
    (non-fatal) end up on ``Afdt.warnings``.
    """
    errors: list[Diagnostic] = []
    decls = list(declarations)
    lines: dict[str, int | None] = {}
    raw: dict[str, LeafDecl | GateDecl] = {}
    counters: dict[str, list[str]] = {}

    for d in decls:
        if isinstance(d, CounterDecl):
            continue
        if not IDENT_RE.match(d.id):
            errors.append(Diagnostic("InvalidId", f"{d.id!r} is not a valid identifier", d.line))
        if d.id in raw:
            errors.append(Diagnostic("DuplicateId", f"node {d.id!r} declared twice", d.line))
            continue
        raw[d.id] = d
        lines[d.id] = d.line

    for d in decls:
        if not isinstance(d, CounterDecl):
            continue
        for ref in (d.host, d.counter):
            if ref not in raw:
                errors.append(Diagnostic("UnknownReference", f"counter refers to unknown node {ref!r}", d.line))
        if d.host == d.counter:
            errors.append(Diagnostic("SelfReference", f"node {d.host!r} counters itself", d.line))
            errors.append(Diagnostic("CycleDetected", f"{d.host} -> {d.host}", d.line))
            continue
        if d.host in raw and d.counter in raw:
            hosted = counters.setdefault(d.host, [])
            if d.counter not in hosted:
                hosted.append(d.counter)

    for d in raw.values():
        if not isinstance(d, GateDecl):
            continue
        if not d.children:
            errors.append(Diagnostic("EmptyGate", f"gate {d.id!r} has no children", d.line))
        for c in d.children:
            if c not in raw:
                errors.append(Diagnostic("UnknownReference", f"gate {d.id!r} refers to unknown node {c!r}", d.line))
        if d.id in d.children:
            errors.append(Diagnostic("SelfReference", f"gate {d.id!r} lists itself as a child", d.line))
            errors.append(Diagnostic("CycleDetected", f"{d.id} -> {d.id}", d.line))
        if d.type is NodeType.VOT and not 1 <= d.k <= len(d.children):
            errors.append(
                Diagnostic("VotOutOfRange", f"gate {d.id!r}: vot{d.k} over {len(d.children)} children", d.line)
            )

    if toplevel not in raw:
        errors.append(Diagnostic("UnknownReference", f"toplevel {toplevel!r} is not declared"))

    if errors:
        raise ValidationError(errors)

    nodes: dict[str, Node] = {}
    for d in raw.values():
        hosted = tuple(counters.get(d.id, ()))
        if isinstance(d, LeafDecl):
            nodes[d.id] = Node(d.id, d.domain, counters=hosted)
        else:
            nodes[d.id] = Node(d.id, d.type, tuple(d.children), d.k, hosted)

    cycle = _find_cycle(nodes)
    if cycle:
        errors.append(Diagnostic("CycleDetected", " -> ".join(cycle), lines.get(cycle[0])))
    for n in nodes.values():
        if toplevel in n.children or toplevel in n.counters:
            errors.append(Diagnostic("NotARoot", f"toplevel {toplevel!r} has parent {n.id!r}", lines.get(n.id)))
    if errors:
        raise ValidationError(errors)

    return Afdt(name, nodes, toplevel, tuple(_polarity_warnings(nodes, lines)))


def _successors(node: Node) -> tuple[str, ...]:
    return node.children + node.counters


def _find_cycle(nodes: Mapping[str, Node]) -> list[str] | None:
    white, grey, black = 0, 1, 2
    colour = dict.fromkeys(nodes, white)
    for root in sorted(nodes):
        if colour[root] != white:
            continue
        stack = [(root, iter(_successors(nodes[root])))]
        path = [root]
        colour[root] = grey
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                colour[v] = black
            elif colour[nxt] == grey:
                return path[path.index(nxt):] + [nxt]
            elif colour[nxt] == white:
                colour[nxt] = grey
                path.append(nxt)
                stack.append((nxt, iter(_successors(nodes[nxt]))))
    return None


def _leaf_sets(nodes: Mapping[str, Node], via_counters: bool) -> dict[str, frozenset[str]]:
    """For every node, the leaves below it (memoised over the DAG)."""
    memo: dict[str, frozenset[str]] = {}

    def visit(v: str) -> frozenset[str]:
        hit = memo.get(v)
        if hit is not None:
            return hit
        node = nodes[v]
        below = node.children + node.counters if via_counters else node.children
        out = frozenset({v}) if node.is_leaf else frozenset()
        out = out.union(*(visit(c) for c in below))
        memo[v] = out
        return out

    for v in nodes:
        visit(v)
    return memo


def _polarity_warnings(nodes: Mapping[str, Node], lines: Mapping[str, int | None]) -> list[Diagnostic]:
    """Warn when an attack/fault-side node is countered by something with no defense in it."""
    if not any(n.counters for n in nodes.values()):
        return []
    own = _leaf_sets(nodes, via_counters=False)
    full = _leaf_sets(nodes, via_counters=True)
    out = []
    for n in nodes.values():
        if not n.counters:
            continue
        if own[n.id] and all(nodes[v].type is DEFENSE for v in own[n.id]):
            continue
        for c in n.counters:
            if not any(nodes[v].type is DEFENSE for v in full[c]):
                out.append(
                    Diagnostic(
                        "CounterWithoutDefense",
                        f"counter {c!r} on {n.id!r} contains no BDS leaf",
                        lines.get(n.id),
                        severity="warning",
                    )
                )
    return out


# --- semantics --------------------------------------------------------------


def _value(
    t: Afdt,
    active: frozenset[str] | set[str],
    v: str,
    pins: Mapping[str, bool],
    memo: dict[str, bool],
) -> bool:
    if v in pins:
        return pins[v]
    hit = memo.get(v)
    if hit is not None:
        return hit
    node = t.nodes[v]
    if node.is_leaf:
        result = v in active
    else:
        need = node.threshold
        count = 0
        result = False
        for c in node.children:
            if _value(t, active, c, pins, memo):
                count += 1
                if count >= need:
                    result = True
                    break
    if result:
        for c in node.counters:
            if _value(t, active, c, pins, memo):
                result = False
                break
    memo[v] = result
    return result


def structure_eval(
    t: Afdt,
    r: RiskScenario | Iterable[str],
    v: str,
    pins: Mapping[str, bool] | None = None,
    memo: dict[str, bool] | None = None,
) -> bool:
    """Truth value of node ``v`` under scenario ``r``.

    Pinned nodes take their pinned value outright, counters included. Any
    other node is computed from its gate (or scenario membership for a leaf),
    then forced false if one of its counters is true.

    ``memo`` may be shared between calls that use the same ``r`` and ``pins``.
    """
    if v not in t.nodes:
        raise UnknownNode(v)
    pins = pins or {}
    for p in pins:
        if p not in t.nodes:
            raise UnknownNode(p)
    active = r.active if isinstance(r, RiskScenario) else frozenset(r)
    return _value(t, active, v, pins, {} if memo is None else memo)


def reachable_leaves(t: Afdt, roots: Iterable[str], stop: Mapping[str, bool] | frozenset[str] = frozenset()) -> set[str]:
    """Leaves reachable from ``roots`` over child and counter edges, not passing through ``stop``."""
    seen: set[str] = set()
    out: set[str] = set()
    todo = list(roots)
    while todo:
        v = todo.pop()
        if v in seen or v in stop:
            continue
        seen.add(v)
        node = t[v]
        if node.is_leaf:
            out.add(v)
        todo.extend(node.children)
        todo.extend(node.counters)
    return out


def cone_of_influence(t: Afdt, targets: Iterable[str]) -> set[str]:
    """Every leaf whose value can affect one of ``targets``."""
    targets = list(targets)
    for v in targets:
        if v not in t.nodes:
            raise UnknownNode(v)
    return reachable_leaves(t, targets)
