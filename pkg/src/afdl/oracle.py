"""Exhaustive reference implementation used to test the engine.

Nothing here is shared with the engine apart from ``structure_eval``: the
quantification domain, formula evaluation, minimality check and result
selection are all re-done the slow, obvious way. Every assignment of the
free leaves is evaluated; nothing is pruned.
"""

from __future__ import annotations

from itertools import product
from typing import Mapping

from .engine import AnalysisResult, Stats
from .errors import DomainTooLarge, MissingScenario, UnboundNode
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
from .model import Afdt, RiskScenario, structure_eval

ORACLE_CAP = 16


def _contexts(f: Formula, pins: dict[str, bool], out: list[tuple[str, dict[str, bool]]]) -> None:
    """Collect (node, pins in force) for every atom and MRS occurrence."""
    if isinstance(f, (Atom, MrsPred)):
        out.append((f.node, pins))
    elif isinstance(f, Not):
        _contexts(f.operand, pins, out)
    elif isinstance(f, (And, Or)):
        _contexts(f.left, pins, out)
        _contexts(f.right, pins, out)
    elif isinstance(f, Implies):
        _contexts(f.antecedent, pins, out)
        _contexts(f.consequent, pins, out)
    elif isinstance(f, Vot):
        for o in f.operands:
            _contexts(o, pins, out)
    elif isinstance(f, Evidence):
        _contexts(f.body, {**pins, **dict(f.pins)}, out)


def _names(f: Formula) -> set[str]:
    found: list[tuple[str, dict[str, bool]]] = []
    _contexts(f, {}, found)
    names = {v for v, _ in found}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Evidence):
            names.update(g.pins)
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.operand)
        elif isinstance(g, (And, Or)):
            stack += [g.left, g.right]
        elif isinstance(g, Implies):
            stack += [g.antecedent, g.consequent]
        elif isinstance(g, Vot):
            stack += list(g.operands)
    return names


def oracle_domain(t: Afdt, f: Formula, policy: Policy, pins: Mapping[str, bool] | None = None) -> list[str]:
    for v in sorted(_names(f) | set(pins or {})):
        if v not in t.nodes:
            raise UnboundNode(v)
    contexts: list[tuple[str, dict[str, bool]]] = []
    _contexts(f, dict(pins or {}), contexts)
    free: set[str] = set()
    for start, ctx in contexts:
        # Grow the live set to a fixed point, never entering pinned nodes.
        live = set() if start in ctx else {start}
        while True:
            grown = set(live)
            for v in live:
                node = t.nodes[v]
                grown.update(c for c in node.children + node.counters if c not in ctx)
            if grown == live:
                break
            live = grown
        free.update(v for v in live if t.nodes[v].is_leaf)
    return sorted(v for v in free if t.nodes[v].type in policy.domains)


def oracle_holds(
    t: Afdt, active: frozenset[str], f: Formula, pins: dict[str, bool], policy: Policy
) -> bool:
    if isinstance(f, Atom):
        return structure_eval(t, active, f.node, pins)
    if isinstance(f, Not):
        return not oracle_holds(t, active, f.operand, pins, policy)
    if isinstance(f, And):
        a = oracle_holds(t, active, f.left, pins, policy)
        b = oracle_holds(t, active, f.right, pins, policy)
        return a and b
    if isinstance(f, Or):
        a = oracle_holds(t, active, f.left, pins, policy)
        b = oracle_holds(t, active, f.right, pins, policy)
        return a or b
    if isinstance(f, Implies):
        a = oracle_holds(t, active, f.antecedent, pins, policy)
        b = oracle_holds(t, active, f.consequent, pins, policy)
        return b or not a
    if isinstance(f, Vot):
        return sum(oracle_holds(t, active, o, pins, policy) for o in f.operands) >= f.k
    if isinstance(f, Evidence):
        return oracle_holds(t, active, f.body, {**pins, **dict(f.pins)}, policy)
    if isinstance(f, MrsPred):
        return oracle_minimal(t, active, Atom(f.node), pins, policy)
    raise TypeError(f"not a formula: {f!r}")


def oracle_minimal(
    t: Afdt, active: frozenset[str], f: Formula, pins: dict[str, bool], policy: Policy
) -> bool:
    if not oracle_holds(t, active, f, pins, policy):
        return False
    removable = [v for v in sorted(active) if v not in pins and t.nodes[v].type in policy.domains]
    for bits in product((False, True), repeat=len(removable)):
        dropped = {v for v, drop in zip(removable, bits) if drop}
        if dropped and oracle_holds(t, active - dropped, f, pins, policy):
            return False
    return True


def _all_scenarios(leaves: list[str]) -> list[frozenset[str]]:
    return [frozenset(v for v, on in zip(leaves, bits) if on) for bits in product((False, True), repeat=len(leaves))]


def _first(scenarios: list[frozenset[str]]) -> frozenset[str]:
    return min(scenarios, key=lambda s: (len(s), sorted(s)))


def oracle_eval(
    t: Afdt, f: Formula, policy: Policy = Policy.ATTACK_FAULT_ONLY, kind: QueryKind = QueryKind.QQ_EXISTS
) -> AnalysisResult:
    leaves = oracle_domain(t, f, policy)
    if len(leaves) > ORACLE_CAP:
        raise DomainTooLarge(len(leaves), ORACLE_CAP)
    everything = _all_scenarios(leaves)
    good = [s for s in everything if oracle_holds(t, s, f, {}, policy)]
    good_set = set(good)
    bad = [s for s in everything if s not in good_set]
    stats = Stats(len(everything), len(leaves))
    if kind is QueryKind.QQ_EXISTS:
        witness = RiskScenario.of(t, _first(good)) if good else None
        return AnalysisResult(kind, bool(good), witness=witness, stats=stats)
    if kind is QueryKind.QQ_FORALL:
        cex = RiskScenario.of(t, _first(bad)) if bad else None
        return AnalysisResult(kind, not bad, counterexample=cex, stats=stats)
    raise ValueError(f"oracle_eval handles quantified queries, not {kind}")


def oracle_mrs(
    t: Afdt,
    target: str,
    pins: Mapping[str, bool] | None = None,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
) -> AnalysisResult:
    pins = dict(pins or {})
    leaves = oracle_domain(t, Atom(target), policy, pins)
    if len(leaves) > ORACLE_CAP:
        raise DomainTooLarge(len(leaves), ORACLE_CAP)
    everything = _all_scenarios(leaves)
    sat = [s for s in everything if structure_eval(t, s, target, pins)]
    minimal = [s for s in sat if not any(other < s for other in sat)]
    minimal.sort(key=lambda s: (len(s), sorted(s)))
    mrs = tuple(RiskScenario.of(t, s) for s in minimal)
    stats = Stats(len(everything), len(leaves))
    return AnalysisResult(QueryKind.SSQ, mrs, mrs_set=mrs, stats=stats, pins=EvidenceMap(pins))


def oracle_query(t: Afdt, q: Query, scenario: RiskScenario | None = None) -> AnalysisResult:
    if q.kind is QueryKind.BQ:
        if scenario is None:
            raise MissingScenario()
        verdict = oracle_holds(t, scenario.active, q.body, {}, q.policy)
        return AnalysisResult(q.kind, verdict, stats=Stats(1, 0), scenario=scenario)
    if q.kind is QueryKind.SSQ:
        body, pins = q.body, {}
        layers = []
        while isinstance(body, Evidence):
            layers.append(dict(body.pins))
            body = body.body
        for layer in layers:
            pins.update(layer)
        assert isinstance(body, MrsPred)
        return oracle_mrs(t, body.node, pins, q.policy)
    return oracle_eval(t, q.body, q.policy, q.kind)
