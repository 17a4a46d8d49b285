"""Command-line front end.

Exit codes: 0 success (or property holds with --exit-status), 1 property
fails with --exit-status, 2 model/query/usage errors, 3 I/O errors,
4 quantification domain over the cap.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TextIO

from . import corpus
from .afdt_format import parse_afdt_text
from .dot import export_dot
from .engine import DEFAULT_CAP, AnalysisResult, evaluate_query
from .errors import AfdlError, DomainTooLarge, SourceError, ValidationError
from .logic import Policy, Query, QueryKind
from .model import Afdt, RiskScenario

EXIT_OK, EXIT_FAILS, EXIT_ERROR, EXIT_IO, EXIT_TOO_LARGE = 0, 1, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None


def _load_model(source: str) -> Afdt:
    """A path to an .afdt file, or the name of a bundled model."""
    if not Path(source).exists() and source in corpus.MODELS:
        source = str(corpus.model_path(source))
    text = _read(source)
    try:
        return parse_afdt_text(text)
    except SourceError as exc:
        raise _Fail(EXIT_ERROR, f"{source}:{exc}") from None
    except ValidationError as exc:
        raise _Fail(EXIT_ERROR, "\n".join(f"{source}: {d}" for d in exc.diagnostics)) from None


def _load_query(source: str, t: Afdt, policy: Policy) -> Query:
    """A path to a .lafdl/.afdl file, or inline query text."""
    path = Path(source)
    text = _read(source) if path.suffix in (".lafdl", ".afdl") or path.is_file() else source
    try:
        if path.suffix == ".afdl":
            from .syntax import parse_afdl_query

            return parse_afdl_query(text, policy)
        return corpus.compile_text(text, t, policy)
    except AfdlError as exc:
        raise _Fail(EXIT_ERROR, f"query error: {exc}") from None


def _scenario(t: Afdt, source: str | None) -> RiskScenario | None:
    if source is None:
        return None
    ids = [s.strip() for s in source.split(",") if s.strip()]
    try:
        return RiskScenario.of(t, ids)
    except (AfdlError, ValueError) as exc:
        raise _Fail(EXIT_ERROR, f"bad scenario: {exc}") from None


def render_human(result: AnalysisResult) -> str:
    lines = []
    if result.query:
        lines.append(f"query: {result.query}")
    if result.scenario is not None:
        lines.append(f"scenario: {result.scenario}")
    if result.kind is QueryKind.SSQ:
        if result.pins:
            lines.append("pins: " + ", ".join(f"{k}={int(v)}" for k, v in result.pins.items()))
        if result.mrs_set:
            lines.extend(str(r) for r in result.mrs_set)
        else:
            lines.append("no minimal risk scenarios")
    else:
        lines.append(f"verdict: {'true' if result.verdict else 'false'}")
        if result.witness is not None:
            lines.append(f"witness: {result.witness}")
        if result.counterexample is not None:
            lines.append(f"counterexample: {result.counterexample}")
    s = result.stats
    lines.append(
        f"({s.scenarios_examined} scenarios examined, {s.free_leaves} free leaves, {s.elapsed_ms:.1f} ms)"
    )
    return "\n".join(lines) + "\n"


def _run(t: Afdt, q: Query, args: argparse.Namespace) -> AnalysisResult:
    scenario = _scenario(t, args.scenario)
    if q.kind is QueryKind.BQ and scenario is None:
        raise _Fail(EXIT_ERROR, "error: MissingScenario: a Boolean query needs --scenario")
    try:
        if args.workers > 1:
            with ProcessPoolExecutor(args.workers) as pool:
                return evaluate_query(t, q, scenario, args.cap, pool)
        return evaluate_query(t, q, scenario, args.cap)
    except DomainTooLarge as exc:
        raise _Fail(EXIT_TOO_LARGE, f"error: {exc}") from None
    except AfdlError as exc:
        raise _Fail(EXIT_ERROR, f"error: {exc}") from None


def _emit(result: AnalysisResult, args: argparse.Namespace, out: TextIO) -> int:
    if args.json:
        out.write(result.to_json(timing=not args.no_timing))
    else:
        out.write(render_human(result))
    if args.exit_status:
        return EXIT_OK if result.holds else EXIT_FAILS
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    t = _load_model(args.model)
    for w in t.warnings:
        out.write(f"{args.model}: {w}\n")
    out.write(f"OK: {t.name}, {len(t.nodes)} nodes, {len(t.leaves)} leaves\n")
    return EXIT_OK


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    t = _load_model(args.model)
    q = _load_query(args.query, t, Policy(args.policy))
    return _emit(_run(t, q, args), args, out)


def cmd_mrs(args: argparse.Namespace, out: TextIO) -> int:
    t = _load_model(args.model)
    q = _load_query(args.query, t, Policy(args.policy))
    if q.kind is not QueryKind.SSQ:
        raise _Fail(EXIT_ERROR, "error: 'mrs' needs a computeall: MRS(...) query")
    return _emit(_run(t, q, args), args, out)


def cmd_export_dot(args: argparse.Namespace, out: TextIO) -> int:
    dot = export_dot(_load_model(args.model))
    if args.output:
        try:
            Path(args.output).write_text(dot, encoding="utf-8")
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {args.output}: {exc.strerror or exc}") from None
    else:
        out.write(dot)
    return EXIT_OK


REPL_HELP = """\
Enter a query (LangAFDL or AFDL) followed by a blank line.
  :scenario a,b   set the scenario for Boolean queries (empty to clear)
  :policy P       attack-fault | all-domains
  :help           this text
  :quit           leave
"""


def repl(t: Afdt, policy: Policy, cap: int, inp: TextIO, out: TextIO) -> int:
    interactive = inp.isatty()
    scenario: RiskScenario | None = None
    block: list[str] = []

    def prompt() -> None:
        if interactive:
            out.write("...> " if block else "afdl> ")
            out.flush()

    def run_block() -> None:
        text = "\n".join(block)
        block.clear()
        try:
            q = corpus.compile_text(text, t, policy)
            result = evaluate_query(t, q, scenario, cap)
        except AfdlError as exc:
            out.write(f"error: {exc}\n")
            return
        out.write(render_human(result))

    if interactive:
        out.write(f"model {t.name}: {len(t.nodes)} nodes. :help for commands.\n")
    prompt()
    for raw in inp:
        line = raw.rstrip("\n")
        if not block and line.strip().startswith(":"):
            cmd, _, arg = line.strip().partition(" ")
            arg = arg.strip()
            if cmd in (":quit", ":q", ":exit"):
                return EXIT_OK
            if cmd == ":scenario":
                try:
                    ids = [s.strip() for s in arg.split(",") if s.strip()]
                    scenario = RiskScenario.of(t, ids) if arg else None
                    out.write(f"scenario: {scenario if scenario is not None else '(none)'}\n")
                except (AfdlError, ValueError) as exc:
                    out.write(f"error: {exc}\n")
            elif cmd == ":policy":
                try:
                    policy = Policy(arg)
                    out.write(f"policy: {policy.value}\n")
                except ValueError:
                    out.write("error: policy must be attack-fault or all-domains\n")
            elif cmd == ":help":
                out.write(REPL_HELP)
            else:
                out.write(f"error: unknown command {cmd}\n")
        elif line.strip():
            block.append(line)
        elif block:
            run_block()
        prompt()
    if block:
        run_block()
    return EXIT_OK


def cmd_repl(args: argparse.Namespace, out: TextIO) -> int:
    t = _load_model(args.model)
    return repl(t, Policy(args.policy), args.cap, sys.stdin, out)


def _cap(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("cap must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afdl", description="Query attack-fault-defense trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an .afdt model")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    for name, func, help_ in (
        ("check", cmd_check, "evaluate a query"),
        ("mrs", cmd_mrs, "list minimal risk scenarios of a computeall query"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="model file, or a bundled model name (gridshield, gsaas)")
        p.add_argument("query", help=".lafdl/.afdl file or inline query text")
        p.add_argument("--scenario", help="comma-separated active leaves for Boolean queries")
        p.add_argument("--policy", choices=[x.value for x in Policy], default=Policy.ATTACK_FAULT_ONLY.value)
        p.add_argument("--cap", type=_cap, default=DEFAULT_CAP, help="maximum number of free leaves")
        p.add_argument("--workers", type=int, default=1, help="worker processes for enumeration")
        p.add_argument("--json", action="store_true", help="emit the JSON result document")
        p.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0 (for golden files)")
        p.add_argument("--exit-status", action="store_true", help="exit 1 when the property does not hold")
        p.set_defaults(func=func)

    p = sub.add_parser("export-dot", help="render a model as Graphviz DOT")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("repl", help="interactive query session")
    p.add_argument("model")
    p.add_argument("--policy", choices=[x.value for x in Policy], default=Policy.ATTACK_FAULT_ONLY.value)
    p.add_argument("--cap", type=_cap, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_repl)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except _Fail as exc:
        print(exc.message, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
