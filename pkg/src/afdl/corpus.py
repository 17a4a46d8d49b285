"""Bundled case-study models, query files and their frozen golden results.

Both models are reconstructions (see the header of each ``.afdt`` file), so
the golden results record what the engine computes on them; the oracle
cross-checks every one before it is frozen. Regenerate with::

    python -m afdl.corpus --regen
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .afdt_format import parse_afdt_text
from .engine import AnalysisResult, evaluate_query
from .lang import compile_lang
from .logic import Policy, Query
from .model import Afdt
from .syntax import parse_afdl_query

DATA = resources.files("afdl") / "data"
MODELS = ("gridshield", "gsaas")
_LANG_RE = re.compile(r"\b(check|computeall)\s*:")


@dataclass(frozen=True)
class Artifact:
    name: str
    model: str
    subdir: str
    scenario: tuple[str, ...] | None = None

    @property
    def filename(self) -> str:
        ext = "lafdl" if self.subdir == "listings" else "afdl"
        return f"{self.name}_{self.model}.{ext}"

    def text(self) -> str:
        return (DATA / self.subdir / self.filename).read_text(encoding="utf-8")

    @property
    def golden_name(self) -> str:
        return f"{self.name}_{self.model}.json"


# Scenario used by the two Boolean queries: an insider with a physical sensor attack.
_BQ_SCENARIO = ("INS", "PSA")

ARTIFACTS: tuple[Artifact, ...] = (
    Artifact("eq01", "gridshield", "queries"),
    Artifact("eq02", "gridshield", "queries"),
    Artifact("eq03", "gridshield", "queries"),
    Artifact("eq04", "gridshield", "queries"),
    Artifact("eq05", "gridshield", "queries", _BQ_SCENARIO),
    Artifact("eq11", "gsaas", "queries"),
    Artifact("eq12", "gsaas", "queries"),
    Artifact("eq13", "gsaas", "queries"),
    Artifact("l06", "gridshield", "listings"),
    Artifact("l07", "gridshield", "listings"),
    Artifact("l08", "gridshield", "listings"),
    Artifact("l09", "gridshield", "listings"),
    Artifact("l10", "gridshield", "listings", _BQ_SCENARIO),
    Artifact("l14", "gsaas", "listings"),
    Artifact("l15", "gsaas", "listings"),
    Artifact("l16", "gsaas", "listings"),
)


def load_model(name: str) -> Afdt:
    if name not in MODELS:
        raise KeyError(f"no bundled model named {name!r}; choose from {', '.join(MODELS)}")
    return parse_afdt_text((DATA / "models" / f"{name}.afdt").read_text(encoding="utf-8"))


def model_path(name: str) -> Path:
    return Path(str(DATA / "models" / f"{name}.afdt"))


def looks_like_lang(text: str) -> bool:
    return bool(_LANG_RE.search(text))


def compile_text(text: str, t: Afdt, policy: Policy = Policy.ATTACK_FAULT_ONLY) -> Query:
    """Compile either LangAFDL (has a check:/computeall: block) or plain AFDL text."""
    if looks_like_lang(text):
        return compile_lang(text, t, policy)
    return parse_afdl_query(text, policy)


def run_artifact(a: Artifact, executor=None) -> AnalysisResult:
    t = load_model(a.model)
    q = compile_text(a.text(), t)
    return evaluate_query(t, q, t.scenario(a.scenario) if a.scenario else None, executor=executor)


def golden_text(a: Artifact) -> str:
    return (DATA / "golden" / a.golden_name).read_text(encoding="utf-8")


def regenerate(out_dir: Path) -> list[str]:
    from .oracle import oracle_query

    written = []
    for a in ARTIFACTS:
        result = run_artifact(a)
        t = load_model(a.model)
        q = compile_text(a.text(), t)
        ref = oracle_query(t, q, t.scenario(a.scenario) if a.scenario else None)
        for attr in ("verdict", "witness", "counterexample", "mrs_set"):
            if getattr(result, attr) != getattr(ref, attr):
                raise AssertionError(f"{a.name}: engine and oracle disagree on {attr}")
        path = out_dir / a.golden_name
        path.write_text(result.to_json(timing=False), encoding="utf-8")
        written.append(str(path))
    return written


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m afdl.corpus")
    parser.add_argument("--regen", action="store_true", help="rewrite the golden files")
    parser.add_argument("--out", type=Path, default=Path(str(DATA / "golden")))
    args = parser.parse_args(argv)
    if args.regen:
        for p in regenerate(args.out):
            print(p)
        return 0
    status = 0
    for a in ARTIFACTS:
        same = run_artifact(a).to_json(timing=False) == golden_text(a)
        print(f"{'ok  ' if same else 'DIFF'} {a.golden_name}")
        status |= not same
    return status


if __name__ == "__main__":
    sys.exit(main())
