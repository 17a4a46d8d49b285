import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from afdl import QueryKind, check_exists, check_forall, enumerate_mrs, oracle_eval, oracle_mrs  # noqa: E402
from gen import Case, random_corpus  # noqa: E402

CRITERIA = {
    1: "translation corpus fidelity",
    2: "oracle equivalence",
    3: "MRS properties",
    4: "quantifier duality",
    5: "structural equivalences",
    6: "witness/counterexample validity",
    7: "golden case-study run",
    8: "format round-trips",
    9: "determinism under parallelism",
}
_AC_RE = re.compile(r"::test_ac(\d+)_")
_outcomes: dict[int, list[str]] = {}


@dataclass
class Run:
    case: Case
    exists: object
    forall: object
    mrs: object
    ref_exists: object = None
    ref_forall: object = None
    ref_mrs: object = None


@dataclass
class CorpusRuns:
    runs: list[Run]
    engine_seconds: float
    oracle_seconds: float


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    """Engine and oracle results for every corpus case, computed once per session."""
    runs = []
    engine = oracle = 0.0
    for c in corpus:
        start = time.perf_counter()
        run = Run(
            c,
            check_exists(c.tree, c.formula, c.policy),
            check_forall(c.tree, c.formula, c.policy),
            enumerate_mrs(c.tree, c.target, c.pins, c.policy),
        )
        mid = time.perf_counter()
        run.ref_exists = oracle_eval(c.tree, c.formula, c.policy, QueryKind.QQ_EXISTS)
        run.ref_forall = oracle_eval(c.tree, c.formula, c.policy, QueryKind.QQ_FORALL)
        run.ref_mrs = oracle_mrs(c.tree, c.target, c.pins, c.policy)
        end = time.perf_counter()
        engine += mid - start
        oracle += end - mid
        runs.append(run)
    return CorpusRuns(runs, engine, oracle)


def pytest_runtest_logreport(report):
    m = _AC_RE.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"AC{n} {title}: {status}")
