"""Command-line driver: two-pass checking and the golden-file corpus runner.

Pass one runs the classic checker over the whole program.  Only if some
definition fails is pass two run, re-checking that single definition with
the easy checker in a fresh copy of the environment built by pass one.
"""

from __future__ import annotations

import argparse
import enum
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import surface as S
from .diagnostics import Diagnostic, TypeCheckError, diagnostic_to_dict, render_text
from .infer_classic import ClassicChecker, FirstFailure, check_def, check_program_classic
from .infer_easy import EasyChecker
from .rules import ensure_recursion_limit, render_scheme, validate_annotations
from .tycore import copy_env

__all__ = ["Mode", "WellTyped", "IllTyped", "ParseFailed", "CheckOutcome",
           "check_source", "check_file", "render_outcome", "run_corpus",
           "CorpusReport", "main", "EXIT_OK", "EXIT_TYPE_ERROR",
           "EXIT_PARSE_ERROR", "EXIT_IO_ERROR", "EXIT_USAGE"]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TYPE_ERROR = 1
EXIT_PARSE_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_USAGE = 64


class Mode(enum.Enum):
    EASY = "easy"
    CLASSIC = "classic"
    BOTH = "both"


@dataclass(frozen=True)
class WellTyped:
    schemes: tuple  # of (name, rendered scheme)


@dataclass(frozen=True)
class IllTyped:
    classic: Diagnostic
    easy: Optional[Diagnostic]  # None when pass two was not requested
    def_index: int


@dataclass(frozen=True)
class ParseFailed:
    diagnostic: Diagnostic


@dataclass(frozen=True)
class CheckOutcome:
    status: Union[WellTyped, IllTyped, ParseFailed]
    timing: dict = field(default_factory=dict)  # seconds per pass
    easy_pass_runs: int = 0

    @property
    def exit_code(self) -> int:
        if isinstance(self.status, WellTyped):
            return EXIT_OK
        if isinstance(self.status, ParseFailed):
            return EXIT_PARSE_ERROR
        return EXIT_TYPE_ERROR


def _recheck_easy(failure: FirstFailure, prog: list, classic_diag: Diagnostic) -> Diagnostic:
    env = copy_env(failure.env)
    d = prog[failure.index - 1]
    try:
        check_def(EasyChecker, env, d)
    except TypeCheckError as err:
        return err.diagnostic
    # Both orders solve the same constraints, so this is a checker bug.
    log.warning("easy pass accepted definition %d rejected by the classic pass; "
                "reporting the classic diagnostic", failure.index)
    return classic_diag


def check_source(source: str, file: str = "<string>", mode: Mode = Mode.EASY) -> CheckOutcome:
    ensure_recursion_limit()
    timing = {"classic": 0.0, "easy": 0.0}
    try:
        prog = S.parse_program(source, file)
        validate_annotations(prog)
    except S.ParseError as err:
        return CheckOutcome(ParseFailed(Diagnostic.from_parse_error(err)), timing)

    start = time.perf_counter()
    result = check_program_classic(prog)
    timing["classic"] = time.perf_counter() - start
    if not isinstance(result, FirstFailure):
        weak: dict = {}
        schemes = tuple((name, render_scheme(s, weak)) for name, s in result.schemes)
        return CheckOutcome(WellTyped(schemes), timing)
    if mode is Mode.CLASSIC:
        return CheckOutcome(IllTyped(result.diagnostic, None, result.index), timing)

    start = time.perf_counter()
    easy = _recheck_easy(result, prog, result.diagnostic)
    timing["easy"] = time.perf_counter() - start
    return CheckOutcome(IllTyped(result.diagnostic, easy, result.index), timing, 1)


def check_file(path, mode: Mode = Mode.EASY) -> CheckOutcome:
    """Check a file on disk; raises :class:`OSError` if it cannot be read."""
    path = Path(path)
    source = path.read_text(encoding="utf-8")
    return check_source(source, path.name, mode)


def render_outcome(outcome: CheckOutcome, source: str, mode: Mode,
                   color: bool = False, as_json: bool = False) -> tuple[str, str]:
    """The (stdout, stderr) text the CLI prints for ``outcome``."""
    import json

    st = outcome.status
    if isinstance(st, WellTyped):
        if as_json:
            obj = {"version": 1, "kind": "well_typed",
                   "schemes": [{"name": n, "type": t} for n, t in st.schemes]}
            return json.dumps(obj) + "\n", ""
        return "".join(f"val {n} : {t}\n" for n, t in st.schemes), ""
    if isinstance(st, ParseFailed):
        if as_json:
            return json.dumps(diagnostic_to_dict(st.diagnostic)) + "\n", ""
        return "", render_text(st.diagnostic, source, color)

    labelled = []
    if mode in (Mode.CLASSIC, Mode.BOTH):
        labelled.append(("classic", st.classic))
    if mode in (Mode.EASY, Mode.BOTH):
        labelled.append(("easy", st.easy))
    if as_json:
        out = []
        for label, d in labelled:
            obj = diagnostic_to_dict(d)
            obj["pass"] = label
            obj["def_index"] = st.def_index
            out.append(json.dumps(obj) + "\n")
        return "".join(out), ""
    if mode is not Mode.BOTH:
        return "", render_text(labelled[0][1], source, color)
    parts = [f"[{label}]\n" + render_text(d, source, color) for label, d in labelled]
    return "", "\n".join(parts)


# --- corpus ---------------------------------------------------------------------

@dataclass
class CorpusReport:
    passed: list = field(default_factory=list)
    failed: list = field(default_factory=list)  # (name, reason)
    updated: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failed


def _golden_text(outcome: CheckOutcome, source: str, mode: Mode) -> str:
    out, err = render_outcome(outcome, source, mode)
    return out + err


def run_corpus(directory, update: bool = False, out=None) -> CorpusReport:
    """Check every ``NAME.src`` in ``directory`` against ``expected/NAME.expected``
    (easy mode) and, when present, ``expected/NAME.classic.expected``."""
    out = out if out is not None else sys.stdout
    directory = Path(directory)
    expected_dir = directory / "expected"
    report = CorpusReport()
    start = time.perf_counter()
    for src in sorted(directory.glob("*.src")):
        name = src.stem
        source = src.read_text(encoding="utf-8")
        outcome = check_source(source, src.name, Mode.BOTH)
        goldens = [(expected_dir / f"{name}.expected", Mode.EASY)]
        classic_path = expected_dir / f"{name}.classic.expected"
        if classic_path.exists() or (update and isinstance(outcome.status, IllTyped)):
            goldens.append((classic_path, Mode.CLASSIC))
        problems = []
        for path, mode in goldens:
            actual = _golden_text(outcome, source, mode)
            if update:
                expected_dir.mkdir(parents=True, exist_ok=True)
                if not path.exists() or path.read_text(encoding="utf-8") != actual:
                    path.write_text(actual, encoding="utf-8")
                    report.updated.append(path.name)
            elif not path.exists():
                problems.append(f"missing golden {path.name}")
            elif path.read_text(encoding="utf-8") != actual:
                problems.append(f"output differs from {path.name}")
        if problems:
            report.failed.append((name, "; ".join(problems)))
            print(f"FAIL {name}: {'; '.join(problems)}", file=out)
        else:
            report.passed.append(name)
            print(f"ok   {name}", file=out)
    report.seconds = time.perf_counter() - start
    summary = f"{len(report.passed)} passed, {len(report.failed)} failed"
    if update:
        summary += f", {len(report.updated)} golden file(s) rewritten"
    print(f"{summary} in {report.seconds:.2f}s", file=out)
    return report


# --- CLI --------------------------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlcheck", description="Type-check a mini-ML program.")
    p.add_argument("file", nargs="?", help="source file to check")
    modes = p.add_mutually_exclusive_group()
    modes.add_argument("--easy-type-errors", dest="mode", action="store_const",
                       const=Mode.EASY, help="explain type errors with the easy order (default)")
    modes.add_argument("--classic", dest="mode", action="store_const", const=Mode.CLASSIC,
                       help="report the classic left-to-right diagnostic only")
    modes.add_argument("--both", dest="mode", action="store_const", const=Mode.BOTH,
                       help="report both diagnostics, labelled")
    p.add_argument("--json", action="store_true", help="print diagnostics as JSON on stdout")
    p.add_argument("--color", choices=["auto", "always", "never"], default="auto")
    p.add_argument("--corpus", metavar="DIR", help="run the golden-file corpus in DIR")
    p.add_argument("--update-goldens", action="store_true",
                   help="with --corpus, rewrite the golden files")
    p.set_defaults(mode=Mode.EASY)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.corpus is None and args.file is None:
            raise _UsageError("exactly one input file is required")
        if args.corpus is not None and args.file is not None:
            raise _UsageError("--corpus takes no input file")
        if args.update_goldens and args.corpus is None:
            raise _UsageError("--update-goldens requires --corpus")
    except _UsageError as err:
        print(f"mlcheck: {err}", file=sys.stderr)
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    if args.corpus is not None:
        if not Path(args.corpus).is_dir():
            print(f"mlcheck: cannot read corpus directory {args.corpus}", file=sys.stderr)
            return EXIT_IO_ERROR
        return EXIT_OK if run_corpus(args.corpus, args.update_goldens).ok else EXIT_TYPE_ERROR

    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        print(f"mlcheck: cannot read {args.file}: {err}", file=sys.stderr)
        return EXIT_IO_ERROR
    color = args.color == "always" or (args.color == "auto" and sys.stderr.isatty())
    outcome = check_source(source, Path(args.file).name, args.mode)
    out, err = render_outcome(outcome, source, args.mode, color and not args.json, args.json)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return outcome.exit_code


def _entry() -> None:
    sys.exit(main())
