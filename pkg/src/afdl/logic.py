"""AFDL formulas and their evaluation under a single risk scenario."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import UnboundNode
from .model import ATTACK, DEFENSE, FAULT, Afdt, NodeType, RiskScenario, _value, reachable_leaves


class EvidenceMap(Mapping[str, bool]):
    """Immutable node -> bool pinning. Keeps insertion order for rendering;
    equality ignores order."""

    __slots__ = ("_pins", "_hash")

    def __init__(self, pins: Mapping[str, bool] | Iterable[tuple[str, bool]] = ()):
        items = pins.items() if isinstance(pins, Mapping) else pins
        self._pins = {str(k): bool(v) for k, v in items}
        self._hash = hash(frozenset(self._pins.items()))

    def __getitem__(self, key: str) -> bool:
        return self._pins[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._pins)

    def __len__(self) -> int:
        return len(self._pins)

    def __contains__(self, key: object) -> bool:
        return key in self._pins

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, EvidenceMap):
            return self._hash == other._hash and self._pins == other._pins
        if isinstance(other, Mapping):
            return self._pins == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"EvidenceMap({self._pins!r})"

    def override(self, inner: Mapping[str, bool]) -> "EvidenceMap":
        """This map with ``inner`` taking precedence on shared keys."""
        if not inner:
            return self
        if not self._pins:
            return inner if isinstance(inner, EvidenceMap) else EvidenceMap(inner)
        return EvidenceMap({**self._pins, **inner})


NO_PINS = EvidenceMap()


# --- formulas -----------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def at(self, pins: Mapping[str, bool]) -> "Evidence":
        return Evidence(self, pins if isinstance(pins, EvidenceMap) else EvidenceMap(pins))

    def __str__(self) -> str:
        from .syntax import render_formula

        return render_formula(self)


@dataclass(frozen=True, repr=False, eq=True)
class Atom(Formula):
    node: str

    def __repr__(self) -> str:
        return f"Atom({self.node!r})"


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class Vot(Formula):
    k: int
    operands: tuple[Formula, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "operands", tuple(self.operands))
        if not 1 <= self.k <= len(self.operands):
            raise ValueError(f"VOT>={self.k} needs at least {self.k} operands, got {len(self.operands)}")


@dataclass(frozen=True)
class Evidence(Formula):
    body: Formula
    pins: EvidenceMap

    def __post_init__(self) -> None:
        if not isinstance(self.pins, EvidenceMap):
            object.__setattr__(self, "pins", EvidenceMap(self.pins))


@dataclass(frozen=True)
class MrsPred(Formula):
    node: str


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def _flatten(f: Formula, cls: type) -> list[Formula]:
    if isinstance(f, cls):
        return _flatten(f.left, cls) + _flatten(f.right, cls)  # type: ignore[attr-defined]
    return [f]


def normalize(f: Formula) -> Formula:
    """Left-associate every And/Or chain so that (a & b) & c == a & (b & c)."""
    if isinstance(f, (And, Or)):
        parts = [normalize(p) for p in _flatten(f, type(f))]
        return conj(*parts) if isinstance(f, And) else disj(*parts)
    if isinstance(f, Not):
        return Not(normalize(f.operand))
    if isinstance(f, Implies):
        return Implies(normalize(f.antecedent), normalize(f.consequent))
    if isinstance(f, Vot):
        return Vot(f.k, tuple(normalize(o) for o in f.operands))
    if isinstance(f, Evidence):
        return Evidence(normalize(f.body), f.pins)
    return f


def referenced_nodes(f: Formula) -> set[str]:
    """Every node id a formula mentions, evidence keys included."""
    if isinstance(f, (Atom, MrsPred)):
        return {f.node}
    if isinstance(f, Not):
        return referenced_nodes(f.operand)
    if isinstance(f, (And, Or)):
        return referenced_nodes(f.left) | referenced_nodes(f.right)
    if isinstance(f, Implies):
        return referenced_nodes(f.antecedent) | referenced_nodes(f.consequent)
    if isinstance(f, Vot):
        return set().union(*(referenced_nodes(o) for o in f.operands))
    if isinstance(f, Evidence):
        return referenced_nodes(f.body) | set(f.pins)
    raise TypeError(f"not a formula: {f!r}")


def check_bound(t: Afdt, f: Formula, pins: Mapping[str, bool] = NO_PINS) -> None:
    for v in sorted(referenced_nodes(f) | set(pins)):
        if v not in t.nodes:
            raise UnboundNode(v)


# --- queries ----------------------------------------------------------------


class Policy(Enum):
    ATTACK_FAULT_ONLY = "attack-fault"
    ALL_DOMAINS = "all-domains"

    @property
    def domains(self) -> frozenset[NodeType]:
        if self is Policy.ATTACK_FAULT_ONLY:
            return frozenset({ATTACK, FAULT})
        return frozenset({ATTACK, FAULT, DEFENSE})


class QueryKind(Enum):
    BQ = "BQ"
    QQ_EXISTS = "QQ_EXISTS"
    QQ_FORALL = "QQ_FORALL"
    SSQ = "SSQ"


def mrs_request(f: Formula) -> tuple[str, EvidenceMap]:
    """Split an ``Evidence*(MrsPred(n))`` formula into ``n`` and its merged pins."""
    layers = []
    while isinstance(f, Evidence):
        layers.append(f.pins)
        f = f.body
    if not isinstance(f, MrsPred):
        raise ValueError("an SSQ body must be MRS(node), optionally wrapped in evidence")
    pins = NO_PINS
    for layer in layers:  # outermost first, so inner layers win
        pins = pins.override(layer)
    return f.node, pins


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    body: Formula
    policy: Policy = Policy.ATTACK_FAULT_ONLY

    def __post_init__(self) -> None:
        if self.kind is QueryKind.SSQ:
            mrs_request(self.body)

    def with_policy(self, policy: Policy) -> "Query":
        return Query(self.kind, self.body, policy)

    def __str__(self) -> str:
        from .syntax import render_query

        return render_query(self)


# --- evaluation -------------------------------------------------------------


class _Evaluator:
    """Evaluates formulas against one fixed scenario, sharing node memos per pin context."""

    def __init__(self, t: Afdt, active: frozenset[str], policy: Policy):
        self.t = t
        self.active = active
        self.policy = policy
        self.memos: dict[EvidenceMap, dict[str, bool]] = {}

    def node(self, v: str, pins: EvidenceMap) -> bool:
        if v not in self.t.nodes:
            raise UnboundNode(v)
        memo = self.memos.get(pins)
        if memo is None:
            memo = self.memos[pins] = {}
        return _value(self.t, self.active, v, pins, memo)

    def __call__(self, f: Formula, pins: EvidenceMap) -> bool:
        if isinstance(f, Atom):
            return self.node(f.node, pins)
        if isinstance(f, Not):
            return not self(f.operand, pins)
        if isinstance(f, And):
            return self(f.left, pins) and self(f.right, pins)
        if isinstance(f, Or):
            return self(f.left, pins) or self(f.right, pins)
        if isinstance(f, Implies):
            return (not self(f.antecedent, pins)) or self(f.consequent, pins)
        if isinstance(f, Vot):
            count = 0
            for o in f.operands:
                if self(o, pins):
                    count += 1
                    if count >= f.k:
                        return True
            return False
        if isinstance(f, Evidence):
            for v in f.pins:
                if v not in self.t.nodes:
                    raise UnboundNode(v)
            return self(f.body, pins.override(f.pins))
        if isinstance(f, MrsPred):
            if f.node not in self.t.nodes:
                raise UnboundNode(f.node)
            return _is_minimal(self.t, self.active, Atom(f.node), pins, self.policy, self)
        raise TypeError(f"not a formula: {f!r}")


def _as_pins(pins: Mapping[str, bool] | None) -> EvidenceMap:
    if pins is None:
        return NO_PINS
    return pins if isinstance(pins, EvidenceMap) else EvidenceMap(pins)


def _active(r: RiskScenario | Iterable[str]) -> frozenset[str]:
    return r.active if isinstance(r, RiskScenario) else frozenset(r)


def eval_formula(
    t: Afdt,
    r: RiskScenario | Iterable[str],
    f: Formula,
    pins: Mapping[str, bool] | None = None,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
) -> bool:
    """Truth value of ``f`` under scenario ``r`` (a Boolean query).

    ``policy`` only matters for ``MRS(...)`` sub-formulas, where it decides
    which active leaves count towards minimality.
    """
    return _Evaluator(t, _active(r), policy)(f, _as_pins(pins))


def apply_evidence(f: Formula, e: Mapping[str, bool]) -> Formula:
    return Evidence(f, _as_pins(e))


def _is_minimal(
    t: Afdt,
    active: frozenset[str],
    f: Formula,
    pins: EvidenceMap,
    policy: Policy,
    here: _Evaluator | None = None,
) -> bool:
    if not (here or _Evaluator(t, active, policy))(f, pins):
        return False
    domains = policy.domains
    removable = sorted(v for v in active if v not in pins and t.nodes[v].type in domains)
    fixed = active.difference(removable)
    # Every proper subset is checked: counters make the structure function
    # non-monotone, so no subset can be skipped.
    for size in range(len(removable)):
        for keep in combinations(removable, size):
            if _Evaluator(t, fixed.union(keep), policy)(f, pins):
                return False
    return True


def is_minimal_scenario(
    t: Afdt,
    r: RiskScenario | Iterable[str],
    f: Formula,
    pins: Mapping[str, bool] | None = None,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
) -> bool:
    """True iff ``r`` satisfies ``f`` and no proper subset of its removable leaves does.

    Removable leaves are the active, unpinned leaves in the policy's domains.
    """
    return _is_minimal(t, _active(r), f, _as_pins(pins), policy)


def free_leaves(
    t: Afdt,
    f: Formula,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
    pins: Mapping[str, bool] | None = None,
) -> set[str]:
    """Leaves a quantifier over ``f`` must range over.

    A leaf is free when some atom of ``f`` reaches it without passing through a
    node pinned by the evidence in force at that atom.
    """
    check_bound(t, f, _as_pins(pins))
    out: set[str] = set()

    def walk(g: Formula, ctx: EvidenceMap) -> None:
        if isinstance(g, (Atom, MrsPred)):
            out.update(reachable_leaves(t, [g.node], ctx))
        elif isinstance(g, Not):
            walk(g.operand, ctx)
        elif isinstance(g, (And, Or)):
            walk(g.left, ctx)
            walk(g.right, ctx)
        elif isinstance(g, Implies):
            walk(g.antecedent, ctx)
            walk(g.consequent, ctx)
        elif isinstance(g, Vot):
            for o in g.operands:
                walk(o, ctx)
        elif isinstance(g, Evidence):
            walk(g.body, ctx.override(g.pins))

    walk(f, _as_pins(pins))
    domains = policy.domains
    return {v for v in out if t.nodes[v].type in domains}
