"""Structured type-error diagnostics and their text / JSON renderings.

A :class:`Diagnostic` is a span, a kind-specific payload and a list of
suggestions.  Rendering is kept separate: :func:`render_text` produces the
compiler-style message with a source excerpt, :func:`render_json` a stable
machine-readable object (schema version 1).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional, Union

from .surface import ParseError, Span, parse_type
from .tycore import DisplayTy, DVar, display_of_type_expr, render
from .unify import ConflictKind, UnifyConflict

__all__ = [
    "Role", "ArgRow", "BranchReport", "AppMismatch", "TooManyArgs",
    "IllTypedApp", "BranchMismatch", "MissingElse", "SubexprMismatch",
    "UnboundVar", "GenericUnify", "ParseFailure", "MissingUnit", "MissingBang",
    "MissingRec", "Suggestion", "Diagnostic", "TypeCheckError",
    "render_text", "render_json", "diagnostic_to_dict", "diagnostic_from_dict",
    "diagnostic_from_json", "JSON_SCHEMA_VERSION",
]

JSON_SCHEMA_VERSION = 1


class Role(enum.Enum):
    WHILE_CONDITION = "while_condition"
    WHILE_BODY = "while_body"
    IF_CONDITION = "if_condition"
    SEQ_LEFT = "seq_left"
    PATTERN_OF_MATCH = "pattern_of_match"


# --- suggestions ---------------------------------------------------------------

@dataclass(frozen=True)
class MissingUnit:
    certain: bool
    tag = "missing_unit"


@dataclass(frozen=True)
class MissingBang:
    tag = "missing_bang"


@dataclass(frozen=True)
class MissingRec:
    name: str
    tag = "missing_rec"


Suggestion = Union[MissingUnit, MissingBang, MissingRec]


# --- payloads --------------------------------------------------------------------

@dataclass(frozen=True)
class ArgRow:
    index: int
    expected: DisplayTy
    actual: DisplayTy
    clashed: bool


@dataclass(frozen=True)
class BranchReport:
    construct: str  # "if" or "match"
    accumulated: DisplayTy
    offending: DisplayTy
    offending_index: int
    offending_span: Span
    counterpart_span: Span


@dataclass(frozen=True)
class AppMismatch:
    rows: tuple
    function: Optional[str] = None
    kind = "app_mismatch"


@dataclass(frozen=True)
class TooManyArgs:
    expected_arity: int
    given_arity: int
    fn_type: DisplayTy
    function: Optional[str] = None
    kind = "too_many_args"


@dataclass(frozen=True)
class IllTypedApp:
    fn_return: DisplayTy
    fn_type: DisplayTy
    given_arity: int
    function: Optional[str] = None
    kind = "ill_typed_app"


@dataclass(frozen=True)
class BranchMismatch:
    report: BranchReport
    kind = "branch_mismatch"


@dataclass(frozen=True)
class MissingElse:
    then_type: DisplayTy
    kind = "missing_else"


@dataclass(frozen=True)
class SubexprMismatch:
    role: Role
    expected: DisplayTy
    actual: DisplayTy
    kind = "subexpr_mismatch"


@dataclass(frozen=True)
class UnboundVar:
    name: str
    missing_rec: bool
    kind = "unbound_var"


@dataclass(frozen=True)
class GenericUnify:
    conflict: UnifyConflict
    # "too_many_args" or "no_constructor:<c>" refine the classic wording
    hint: Optional[str] = None
    kind = "generic_unify"


@dataclass(frozen=True)
class ParseFailure:
    message: str
    kind = "parse_error"


Payload = Union[AppMismatch, TooManyArgs, IllTypedApp, BranchMismatch,
                MissingElse, SubexprMismatch, UnboundVar, GenericUnify,
                ParseFailure]


@dataclass(frozen=True)
class Diagnostic:
    span: Span
    payload: Payload
    suggestions: tuple = ()

    @property
    def kind(self) -> str:
        return self.payload.kind

    @classmethod
    def from_parse_error(cls, err: ParseError) -> "Diagnostic":
        return cls(err.span, ParseFailure(err.message))


class TypeCheckError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.kind)
        self.diagnostic = diagnostic


# --- text rendering ----------------------------------------------------------------

_RED = "\x1b[1;31m"
_BOLD = "\x1b[1m"
_RESET = "\x1b[0m"
_MAX_EXCERPT_LINES = 4

_ROLE_SENTENCES = {
    Role.WHILE_CONDITION: "This expression is the condition of a while loop, so it should have type {expected}, but it has type {actual}.",
    Role.WHILE_BODY: "This expression is the body of a while loop, so it should have type {expected}, but it has type {actual}.",
    Role.IF_CONDITION: "This expression is the condition of a conditional, so it should have type {expected}, but it has type {actual}.",
    Role.SEQ_LEFT: "This expression is followed by a semicolon, so it should have type {expected}, but it has type {actual}.",
    Role.PATTERN_OF_MATCH: "This pattern matches values of type {actual}, but the matched expression has type {expected}.",
}


def _paint(text: str, code: str, color: bool) -> str:
    return f"{code}{text}{_RESET}" if color else text


def _header(span: Span) -> str:
    if span.start_line == span.end_line:
        return (f'File "{span.file}", line {span.start_line}, '
                f"characters {span.start_col - 1}-{span.end_col - 1}:")
    return (f'File "{span.file}", lines {span.start_line}-{span.end_line}, '
            f"characters {span.start_col - 1}-{span.end_col - 1}:")


def _excerpt(span: Span, source: str, color: bool) -> list[str]:
    lines = source.split("\n")
    if span.start_line > len(lines):
        return []
    last = min(span.end_line, len(lines))
    shown = list(range(span.start_line, last + 1))
    elided = len(shown) > _MAX_EXCERPT_LINES
    if elided:
        shown = shown[:_MAX_EXCERPT_LINES - 1]
    width = len(str(shown[-1] if not elided else last))
    out = []
    for n in shown:
        text = lines[n - 1].replace("\t", " ").rstrip("\r")
        lo = span.start_col if n == span.start_line else 1 + (len(text) - len(text.lstrip()))
        hi = span.end_col if n == span.end_line else len(text) + 1
        hi = max(hi, lo + 1)
        prefix = f"{str(n).rjust(width)} | "
        out.append(prefix + text)
        carets = _paint("^" * (hi - lo), _RED, color)
        out.append(" " * (len(prefix) + lo - 1) + carets)
    if elided:
        out.append(" " * width + " | ...")
    return out


def _fn_phrase(name: Optional[str]) -> str:
    return f"The function `{name}`" if name else "This function"


def _conflict_lines(c: UnifyConflict, hint: Optional[str]) -> list[str]:
    wl, wr = render(c.whole_left), render(c.whole_right)
    if hint == "too_many_args":
        return [f"This function has type {wl}.", "It is applied to too many arguments."]
    if hint == "pattern":
        return [f"This pattern matches values of type {wl} but a pattern was expected "
                f"which matches values of type {wr}."] + _inner_lines(c, wl, wr)
    if hint and hint.startswith("no_constructor:"):
        return [f"The type {wr} has no constructor {hint.split(':', 1)[1]}."]
    return ([f"This expression has type {wl} but an expression was expected of type {wr}."]
            + _inner_lines(c, wl, wr))


def _inner_lines(c: UnifyConflict, wl: str, wr: str) -> list[str]:
    left, right = render(c.left), render(c.right)
    if c.kind is ConflictKind.OCCURS_CHECK:
        var, other = (left, right) if isinstance(c.left, DVar) else (right, left)
        return [f"The type variable {var} occurs inside {other}."]
    if (left, right) != (wl, wr):
        return [f"Type {left} is not compatible with type {right}."]
    return []


def _body(d: Diagnostic, color: bool) -> list[str]:
    p = d.payload
    err = _paint("Error", _RED, color) + ": "
    if isinstance(p, AppMismatch):
        head = [err + f"{_fn_phrase(p.function)} cannot be applied to these arguments:"]
        exp_cells = ["expected"] + [render(r.expected) for r in p.rows]
        width = max(len(c) for c in exp_cells)
        lines = ["    " + "expected".ljust(width) + " | provided"]
        for r in p.rows:
            mark = "  * " if r.clashed else "    "
            row = mark + render(r.expected).ljust(width) + " | " + render(r.actual)
            lines.append(_paint(row, _BOLD, color) if r.clashed else row)
        return head + lines
    if isinstance(p, TooManyArgs):
        plural = "argument" if p.expected_arity == 1 else "arguments"
        return [err + f"{_fn_phrase(p.function)} has type {render(p.fn_type)}; it is applied "
                f"to too many arguments ({p.expected_arity} {plural} expected, "
                f"{p.given_arity} given)."]
    if isinstance(p, IllTypedApp):
        target = f" of `{p.function}`" if p.function else ""
        return [err + f"This application{target} to {p.given_arity} arguments is ill-typed.",
                f"  The function has type {render(p.fn_type)}; its return type "
                f"{render(p.fn_return)} is a type variable, so the number of "
                "arguments it accepts depends on how it is instantiated."]
    if isinstance(p, BranchMismatch):
        r = p.report
        if r.construct == "if":
            return [err + "The two branches of this conditional have incompatible types:",
                    f"  the then branch has type {render(r.accumulated)},",
                    f"  the else branch has type {render(r.offending)}."]
        n = r.offending_index
        first = "the first branch has" if n == 2 else f"the first {n - 1} branches have"
        return [err + f"Branch {n} of this match is the first whose type does not agree "
                "with the branches before it:",
                f"  {first} type {render(r.accumulated)},",
                f"  branch {n} has type {render(r.offending)}."]
    if isinstance(p, MissingElse):
        return [err + "This conditional has no else branch, so its then branch should have "
                f"type unit, but it has type {render(p.then_type)}."]
    if isinstance(p, SubexprMismatch):
        return [err + _ROLE_SENTENCES[p.role].format(expected=render(p.expected),
                                                      actual=render(p.actual))]
    if isinstance(p, UnboundVar):
        return [err + f"Unbound value {p.name}."]
    if isinstance(p, GenericUnify):
        lines = _conflict_lines(p.conflict, p.hint)
        return [err + lines[0]] + ["  " + x for x in lines[1:]]
    if isinstance(p, ParseFailure):
        return [err + f"Syntax error: {p.message}."]
    raise TypeError(f"unknown diagnostic payload {p!r}")


def _suggestion_text(s: Suggestion) -> str:
    if isinstance(s, MissingUnit):
        where = "" if s.certain else " somewhere"
        return f"You probably forgot to provide `()` as argument{where}."
    if isinstance(s, MissingBang):
        return "You probably forgot a `!` or a `ref` somewhere."
    if isinstance(s, MissingRec):
        return "You probably meant to use `let rec`."
    raise TypeError(f"unknown suggestion {s!r}")


def render_text(d: Diagnostic, source: str, color: bool = False) -> str:
    """Compiler-style message: header, underlined excerpt, body, suggestions."""
    lines = [_header(d.span)]
    lines += _excerpt(d.span, source, color)
    lines += _body(d, color)
    lines += [_suggestion_text(s) for s in d.suggestions]
    return "\n".join(lines) + "\n"


# --- JSON ----------------------------------------------------------------------------

def _span_dict(s: Span) -> dict:
    return {"file": s.file, "start_line": s.start_line, "start_col": s.start_col,
            "end_line": s.end_line, "end_col": s.end_col,
            "byte_start": s.byte_start, "byte_end": s.byte_end}


def _span_from(d: dict) -> Span:
    return Span(d["file"], d["start_line"], d["start_col"], d["end_line"],
                d["end_col"], d["byte_start"], d["byte_end"])


def _ty_from(text: str) -> DisplayTy:
    return display_of_type_expr(parse_type(text))


def _suggestion_dict(s: Suggestion) -> dict:
    out = {"suggestion": s.tag}
    if isinstance(s, MissingUnit):
        out["certain"] = s.certain
    elif isinstance(s, MissingRec):
        out["name"] = s.name
    return out


def _suggestion_from(d: dict) -> Suggestion:
    tag = d["suggestion"]
    if tag == "missing_unit":
        return MissingUnit(d["certain"])
    if tag == "missing_bang":
        return MissingBang()
    if tag == "missing_rec":
        return MissingRec(d["name"])
    raise ValueError(f"unknown suggestion tag {tag!r}")


def _conflict_dict(c: UnifyConflict) -> dict:
    return {"kind": c.kind.value, "left": render(c.left), "right": render(c.right),
            "whole_left": render(c.whole_left), "whole_right": render(c.whole_right)}


def diagnostic_to_dict(d: Diagnostic) -> dict:
    p = d.payload
    out: dict = {"version": JSON_SCHEMA_VERSION, "kind": p.kind, "span": _span_dict(d.span)}
    if isinstance(p, AppMismatch):
        out["function"] = p.function
        out["rows"] = [{"index": r.index, "expected": render(r.expected),
                        "actual": render(r.actual), "clashed": r.clashed} for r in p.rows]
    elif isinstance(p, TooManyArgs):
        out.update(function=p.function, expected_arity=p.expected_arity,
                   given_arity=p.given_arity, fn_type=render(p.fn_type))
    elif isinstance(p, IllTypedApp):
        out.update(function=p.function, fn_return=render(p.fn_return),
                   fn_type=render(p.fn_type), given_arity=p.given_arity)
    elif isinstance(p, BranchMismatch):
        r = p.report
        out["report"] = {"construct": r.construct, "accumulated": render(r.accumulated),
                         "offending": render(r.offending), "offending_index": r.offending_index,
                         "offending_span": _span_dict(r.offending_span),
                         "counterpart_span": _span_dict(r.counterpart_span)}
    elif isinstance(p, MissingElse):
        out["then_type"] = render(p.then_type)
    elif isinstance(p, SubexprMismatch):
        out.update(role=p.role.value, expected=render(p.expected), actual=render(p.actual))
    elif isinstance(p, UnboundVar):
        out.update(name=p.name, missing_rec=p.missing_rec)
    elif isinstance(p, GenericUnify):
        out["conflict"] = _conflict_dict(p.conflict)
        out["hint"] = p.hint
    elif isinstance(p, ParseFailure):
        out["message"] = p.message
    out["suggestions"] = [_suggestion_dict(s) for s in d.suggestions]
    return out


def diagnostic_from_dict(obj: dict) -> Diagnostic:
    if obj.get("version") != JSON_SCHEMA_VERSION:
        raise ValueError(f"unsupported diagnostic schema version {obj.get('version')!r}")
    kind = obj["kind"]
    if kind == "app_mismatch":
        rows = tuple(ArgRow(r["index"], _ty_from(r["expected"]), _ty_from(r["actual"]),
                            r["clashed"]) for r in obj["rows"])
        payload: Payload = AppMismatch(rows, obj["function"])
    elif kind == "too_many_args":
        payload = TooManyArgs(obj["expected_arity"], obj["given_arity"],
                              _ty_from(obj["fn_type"]), obj["function"])
    elif kind == "ill_typed_app":
        payload = IllTypedApp(_ty_from(obj["fn_return"]), _ty_from(obj["fn_type"]),
                              obj["given_arity"], obj["function"])
    elif kind == "branch_mismatch":
        r = obj["report"]
        payload = BranchMismatch(BranchReport(
            r["construct"], _ty_from(r["accumulated"]), _ty_from(r["offending"]),
            r["offending_index"], _span_from(r["offending_span"]),
            _span_from(r["counterpart_span"])))
    elif kind == "missing_else":
        payload = MissingElse(_ty_from(obj["then_type"]))
    elif kind == "subexpr_mismatch":
        payload = SubexprMismatch(Role(obj["role"]), _ty_from(obj["expected"]),
                                  _ty_from(obj["actual"]))
    elif kind == "unbound_var":
        payload = UnboundVar(obj["name"], obj["missing_rec"])
    elif kind == "generic_unify":
        c = obj["conflict"]
        payload = GenericUnify(UnifyConflict(
            ConflictKind(c["kind"]), _ty_from(c["left"]), _ty_from(c["right"]),
            _ty_from(c["whole_left"]), _ty_from(c["whole_right"])), obj["hint"])
    elif kind == "parse_error":
        payload = ParseFailure(obj["message"])
    else:
        raise ValueError(f"unknown diagnostic kind {kind!r}")
    suggestions = tuple(_suggestion_from(s) for s in obj["suggestions"])
    return Diagnostic(_span_from(obj["span"]), payload, suggestions)


def render_json(d: Diagnostic) -> str:
    """One-line JSON object for ``d`` (schema version 1)."""
    return json.dumps(diagnostic_to_dict(d))


def diagnostic_from_json(text: str) -> Diagnostic:
    return diagnostic_from_dict(json.loads(text))
