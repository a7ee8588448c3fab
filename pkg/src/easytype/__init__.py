"""Mini-ML type checker with a classic and an easy inference order."""

from .diagnostics import Diagnostic, TypeCheckError, render_json, render_text
from .driver import CheckOutcome, Mode, check_file, check_source, main, run_corpus
from .infer_classic import check_program_classic, infer_classic
from .infer_easy import check_program_easy, infer_easy
from .surface import ParseError, parse_expr, parse_program, pretty_expr
from .tycore import initial_env

__all__ = [
    "Diagnostic", "TypeCheckError", "render_json", "render_text",
    "CheckOutcome", "Mode", "check_file", "check_source", "main", "run_corpus",
    "check_program_classic", "infer_classic", "check_program_easy", "infer_easy",
    "ParseError", "parse_expr", "parse_program", "pretty_expr", "initial_env",
]
