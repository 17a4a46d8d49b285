"""Query execution: quantified search, witnesses and counterexamples, MRS enumeration.

Scenarios are enumerated over the free leaves of a query in a fixed order:
by cardinality, then lexicographically by leaf id. Witnesses and
counterexamples are the first hit in that order, so results do not depend on
whether the scan runs serially or is split over an executor.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import Executor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import DomainTooLarge, MissingScenario, UnboundNode
from .logic import (
    NO_PINS,
    Atom,
    Evidence,
    EvidenceMap,
    Formula,
    Policy,
    Query,
    QueryKind,
    _Evaluator,
    check_bound,
    free_leaves,
    mrs_request,
)
from .model import Afdt, RiskScenario, _value, scenario_key

DEFAULT_CAP = 24
_MIN_CHUNK = 8


@dataclass(frozen=True)
class QuantDomain:
    leaves: tuple[str, ...]
    base: frozenset[str] = frozenset()

    def scenario(self, picked: Iterable[int]) -> frozenset[str]:
        return self.base.union(self.leaves[i] for i in picked)


@dataclass
class Stats:
    scenarios_examined: int = 0
    free_leaves: int = 0
    elapsed_ms: float = 0.0


@dataclass
class AnalysisResult:
    kind: QueryKind
    verdict: bool | tuple[RiskScenario, ...]
    witness: RiskScenario | None = None
    counterexample: RiskScenario | None = None
    mrs_set: tuple[RiskScenario, ...] | None = None
    stats: Stats = field(default_factory=Stats)
    pins: EvidenceMap = NO_PINS
    query: str | None = None
    scenario: RiskScenario | None = None

    @property
    def holds(self) -> bool:
        """Boolean reading of the verdict; an SSQ holds when some MRS exists."""
        if isinstance(self.verdict, bool):
            return self.verdict
        return bool(self.verdict)

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        def ids(r: RiskScenario) -> list[str]:
            return r.sorted_ids()

        doc: dict[str, Any] = {"kind": self.kind.value}
        if self.query is not None:
            doc["query"] = self.query
        if self.scenario is not None:
            doc["scenario"] = ids(self.scenario)
        if isinstance(self.verdict, bool):
            doc["verdict"] = self.verdict
        else:
            doc["verdict"] = [ids(r) for r in self.verdict]
        if self.witness is not None:
            doc["witness"] = ids(self.witness)
        if self.counterexample is not None:
            doc["counterexample"] = ids(self.counterexample)
        if self.mrs_set is not None:
            doc["mrs_set"] = [ids(r) for r in self.mrs_set]
        if self.pins:
            doc["pins"] = {k: int(v) for k, v in self.pins.items()}
        doc["stats"] = {
            "scenarios_examined": self.stats.scenarios_examined,
            "free_leaves": self.stats.free_leaves,
            "elapsed_ms": round(self.stats.elapsed_ms, 3) if timing else 0,
        }
        return doc

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2) + "\n"


# --- domains ----------------------------------------------------------------


def _outer_pins(f: Formula) -> EvidenceMap:
    pins = NO_PINS
    while isinstance(f, Evidence):
        pins = pins.override(f.pins)
        f = f.body
    return pins


def quant_domain(
    t: Afdt,
    f: Formula,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
    pins: Mapping[str, bool] | None = None,
    cap: int = DEFAULT_CAP,
) -> QuantDomain:
    leaves = tuple(sorted(free_leaves(t, f, policy, pins)))
    if len(leaves) > cap:
        raise DomainTooLarge(len(leaves), cap)
    outer = EvidenceMap(pins or {}).override(_outer_pins(f))
    base = frozenset(v for v, on in outer.items() if on and t.nodes[v].is_leaf and v not in leaves)
    return QuantDomain(leaves, base)


def _levels(n: int) -> Iterator[tuple[int, ...]]:
    for size in range(n + 1):
        yield from combinations(range(n), size)


def _chunks(items: Sequence, workers: int) -> list[Sequence]:
    size = max(_MIN_CHUNK, math.ceil(len(items) / (workers * 4)))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _workers(executor: Executor | None) -> int:
    return getattr(executor, "_max_workers", 2) if executor is not None else 1


# --- quantified search --------------------------------------------------------


def _first_hit(
    t: Afdt,
    f: Formula,
    policy: Policy,
    dom: QuantDomain,
    want: bool,
    candidates: Iterable[tuple[int, ...]],
) -> tuple[tuple[int, ...] | None, int]:
    """First candidate on which ``f`` evaluates to ``want``, and how many were looked at."""
    seen = 0
    for picked in candidates:
        seen += 1
        if _Evaluator(t, dom.scenario(picked), policy)(f, NO_PINS) == want:
            return picked, seen
    return None, seen


def _search(
    t: Afdt,
    f: Formula,
    policy: Policy,
    dom: QuantDomain,
    want: bool,
    executor: Executor | None,
) -> tuple[tuple[int, ...] | None, int]:
    n = len(dom.leaves)
    if executor is None:
        return _first_hit(t, f, policy, dom, want, _levels(n))
    examined = 0
    for size in range(n + 1):
        level = list(combinations(range(n), size))
        futures = [
            executor.submit(_first_hit, t, f, policy, dom, want, chunk)
            for chunk in _chunks(level, _workers(executor))
        ]
        for fut in futures:
            picked, seen = fut.result()
            examined += seen
            if picked is not None:
                for rest in futures:
                    rest.cancel()
                return picked, examined
    return None, examined


def _quantified(
    t: Afdt,
    f: Formula,
    policy: Policy,
    kind: QueryKind,
    cap: int,
    executor: Executor | None,
) -> AnalysisResult:
    start = time.perf_counter()
    check_bound(t, f)
    dom = quant_domain(t, f, policy, cap=cap)
    want = kind is QueryKind.QQ_EXISTS
    picked, seen = _search(t, f, policy, dom, want, executor)
    found = None if picked is None else RiskScenario.of(t, (dom.leaves[i] for i in picked))
    stats = Stats(seen, len(dom.leaves), (time.perf_counter() - start) * 1000)
    if want:
        return AnalysisResult(kind, found is not None, witness=found, stats=stats)
    return AnalysisResult(kind, found is None, counterexample=found, stats=stats)


def check_exists(
    t: Afdt,
    f: Formula,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
    cap: int = DEFAULT_CAP,
    executor: Executor | None = None,
) -> AnalysisResult:
    """Does some risk scenario satisfy ``f``? The witness is the first one found."""
    return _quantified(t, f, policy, QueryKind.QQ_EXISTS, cap, executor)


def check_forall(
    t: Afdt,
    f: Formula,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
    cap: int = DEFAULT_CAP,
    executor: Executor | None = None,
) -> AnalysisResult:
    """Does every risk scenario satisfy ``f``? The counterexample is the first that fails."""
    return _quantified(t, f, policy, QueryKind.QQ_FORALL, cap, executor)


# --- minimal risk scenarios -------------------------------------------------


def _satisfying(
    t: Afdt, target: str, pins: EvidenceMap, dom: QuantDomain, candidates: Sequence[tuple[int, ...]]
) -> list[bool]:
    return [_value(t, dom.scenario(picked), target, pins, {}) for picked in candidates]


def enumerate_mrs(
    t: Afdt,
    target: str,
    pins: Mapping[str, bool] | None = None,
    policy: Policy = Policy.ATTACK_FAULT_ONLY,
    cap: int = DEFAULT_CAP,
    executor: Executor | None = None,
) -> AnalysisResult:
    """All subset-minimal scenarios over the free leaves that make ``target`` true.

    Candidates are visited by increasing size. A candidate containing an MRS
    already found is skipped: it cannot be minimal whatever the tree's
    monotonicity. Every other satisfying candidate has no satisfying proper
    subset (those were all visited earlier), so it is minimal.
    """
    start = time.perf_counter()
    pins = EvidenceMap(pins or {})
    check_bound(t, Atom(target), pins)
    dom = quant_domain(t, Atom(target), policy, pins, cap)
    n = len(dom.leaves)
    found: list[tuple[int, ...]] = []
    masks: list[int] = []
    examined = 0
    for size in range(n + 1):
        if 0 in masks:
            break
        level = []
        for picked in combinations(range(n), size):
            m = sum(1 << i for i in picked)
            if not any(m & fm == fm for fm in masks):
                level.append(picked)
        if not level:
            continue
        examined += len(level)
        if executor is None:
            sat = _satisfying(t, target, pins, dom, level)
        else:
            chunks = _chunks(level, _workers(executor))
            futures = [executor.submit(_satisfying, t, target, pins, dom, c) for c in chunks]
            sat = [ok for fut in futures for ok in fut.result()]
        for picked, ok in zip(level, sat):
            if ok:
                found.append(picked)
                masks.append(sum(1 << i for i in picked))
    mrs = tuple(RiskScenario.of(t, (dom.leaves[i] for i in picked)) for picked in found)
    mrs = tuple(sorted(mrs, key=lambda r: scenario_key(r.active)))
    stats = Stats(examined, n, (time.perf_counter() - start) * 1000)
    return AnalysisResult(QueryKind.SSQ, mrs, mrs_set=mrs, stats=stats, pins=pins)


# --- dispatch ---------------------------------------------------------------


def evaluate_query(
    t: Afdt,
    q: Query,
    scenario: RiskScenario | Iterable[str] | None = None,
    cap: int = DEFAULT_CAP,
    executor: Executor | None = None,
) -> AnalysisResult:
    from .syntax import render_query

    if q.kind is QueryKind.BQ:
        if scenario is None:
            raise MissingScenario()
        check_bound(t, q.body)
        r = scenario if isinstance(scenario, RiskScenario) else RiskScenario.of(t, scenario)
        start = time.perf_counter()
        verdict = _Evaluator(t, r.active, q.policy)(q.body, NO_PINS)
        stats = Stats(1, 0, (time.perf_counter() - start) * 1000)
        result = AnalysisResult(q.kind, verdict, stats=stats, scenario=r)
    elif q.kind is QueryKind.SSQ:
        target, pins = mrs_request(q.body)
        if target not in t.nodes:
            raise UnboundNode(target)
        result = enumerate_mrs(t, target, pins, q.policy, cap, executor)
    else:
        result = _quantified(t, q.body, q.policy, q.kind, cap, executor)
    result.query = render_query(q)
    return result
