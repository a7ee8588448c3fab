"""Lexer, parser, located AST and pretty-printer for the mini-ML language.

The grammar is a small OCaml subset: top-level ``let`` definitions, ``fun``,
curried application, ``let ... in``, ``if``, ``match``, ``while``, sequences,
tuples, list literals and type annotations.  Operators are desugared into
applications of a variable named after the operator, and curried
applications are flattened so that ``f a b`` is a single n-ary ``App``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

__all__ = [
    "Span", "ParseError",
    "Var", "ConstInt", "ConstFloat", "ConstBool", "ConstString", "ConstChar",
    "ConstUnit", "Fun", "App", "Let", "If", "Match", "While", "Seq", "Tuple",
    "ListLit", "Annot", "Expr",
    "PVar", "PWildcard", "PConstInt", "PConstFloat", "PConstBool",
    "PConstString", "PConstChar", "PConstUnit", "PTuple", "PNil", "PCons",
    "Pattern",
    "TEVar", "TEConstr", "TEArrow", "TETuple", "TypeExpr",
    "TopDef", "Program",
    "tokenize", "parse_program", "parse_expr", "parse_type",
    "pretty_expr", "pretty_pattern", "pretty_type", "iter_children",
]


@dataclass(frozen=True)
class Span:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int  # exclusive
    byte_start: int
    byte_end: int

    def contains(self, other: "Span") -> bool:
        return (
            self.byte_start <= other.byte_start
            and other.byte_end <= self.byte_end
            and (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            and (other.end_line, other.end_col) <= (self.end_line, self.end_col)
        )

    def merge(self, other: "Span") -> "Span":
        first = self if self.byte_start <= other.byte_start else other
        last = self if self.byte_end >= other.byte_end else other
        return Span(self.file, first.start_line, first.start_col,
                    last.end_line, last.end_col, first.byte_start, last.byte_end)


NO_SPAN = Span("<none>", 1, 1, 1, 1, 0, 0)


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


def _span_field():
    return field(default=NO_SPAN, compare=False, repr=False)


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstInt:
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstFloat:
    value: float
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstBool:
    value: bool
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstString:
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstChar:
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ConstUnit:
    span: Span = _span_field()


@dataclass(frozen=True)
class Fun:
    params: tuple["Pattern", ...]
    body: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class App:
    fn: "Expr"
    args: tuple["Expr", ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Let:
    is_rec: bool
    name: str
    bound: "Expr"
    body: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then_branch: "Expr"
    else_branch: Optional["Expr"]
    span: Span = _span_field()


@dataclass(frozen=True)
class Match:
    scrutinee: "Expr"
    arms: tuple[tuple["Pattern", "Expr"], ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class While:
    cond: "Expr"
    body: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class Seq:
    first: "Expr"
    second: "Expr"
    span: Span = _span_field()


@dataclass(frozen=True)
class Tuple:
    elems: tuple["Expr", ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class ListLit:
    elems: tuple["Expr", ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Annot:
    expr: "Expr"
    ty: "TypeExpr"
    span: Span = _span_field()


Expr = Union[Var, ConstInt, ConstFloat, ConstBool, ConstString, ConstChar,
             ConstUnit, Fun, App, Let, If, Match, While, Seq, Tuple, ListLit,
             Annot]


# --- patterns --------------------------------------------------------------

@dataclass(frozen=True)
class PVar:
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class PWildcard:
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstInt:
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstFloat:
    value: float
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstBool:
    value: bool
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstString:
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstChar:
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class PConstUnit:
    span: Span = _span_field()


@dataclass(frozen=True)
class PTuple:
    elems: tuple["Pattern", ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class PNil:
    span: Span = _span_field()


@dataclass(frozen=True)
class PCons:
    head: "Pattern"
    tail: "Pattern"
    span: Span = _span_field()


Pattern = Union[PVar, PWildcard, PConstInt, PConstFloat, PConstBool,
                PConstString, PConstChar, PConstUnit, PTuple, PNil, PCons]


# --- type expressions ------------------------------------------------------

@dataclass(frozen=True)
class TEVar:
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class TEConstr:
    name: str
    args: tuple["TypeExpr", ...] = ()
    span: Span = _span_field()


@dataclass(frozen=True)
class TEArrow:
    param: "TypeExpr"
    result: "TypeExpr"
    span: Span = _span_field()


@dataclass(frozen=True)
class TETuple:
    elems: tuple["TypeExpr", ...]
    span: Span = _span_field()


TypeExpr = Union[TEVar, TEConstr, TEArrow, TETuple]


@dataclass(frozen=True)
class TopDef:
    is_rec: bool
    name: str
    body: Expr
    span: Span = _span_field()


Program = list  # list[TopDef], in checking order


# --- lexer -----------------------------------------------------------------

KEYWORDS = {
    "let", "rec", "in", "fun", "if", "then", "else", "match", "with",
    "while", "do", "done", "true", "false", "begin", "end", "mod",
}

# longest first
SYMBOLS = [
    "~-.", ";;", "->", "::", ":=", "<=", ">=", "<>", "&&", "||", "+.", "-.",
    "*.", "/.", "~-", "+", "-", "*", "/", "=", "<", ">", "!", ";", ",", "|",
    "(", ")", "[", "]", ":", "^", "@", "_",
]

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "\\": "\\",
            "'": "'", '"': '"', " ": " "}


@dataclass(frozen=True)
class Token:
    kind: str  # INT FLOAT STRING CHAR IDENT TYVAR KW SYM EOF
    value: object
    span: Span


def _is_ident_char(ch: str) -> bool:
    return ch != "" and (ch.isalnum() or ch in "_'")


class _Lexer:
    def __init__(self, source: str, file: str):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1
        if source.isascii():
            self._bytes = None
        else:
            offsets = [0]
            for ch in source:
                offsets.append(offsets[-1] + len(ch.encode("utf-8")))
            self._bytes = offsets

    def _byte(self, pos: int) -> int:
        return pos if self._bytes is None else self._bytes[pos]

    def _mark(self):
        return (self.pos, self.line, self.col)

    def _span_from(self, mark) -> Span:
        pos, line, col = mark
        return Span(self.file, line, col, self.line, self.col,
                    self._byte(pos), self._byte(self.pos))

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.src[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.src[i] if i < len(self.src) else ""

    def _error(self, message: str, mark=None) -> ParseError:
        mark = mark or self._mark()
        pos, line, col = mark
        end = min(pos + 1, len(self.src))
        return ParseError(message, Span(self.file, line, col, line, col + (end - pos),
                                        self._byte(pos), self._byte(end)))

    def _skip_comment(self) -> None:
        start = self._mark()
        depth = 0
        while True:
            if self.pos >= len(self.src):
                raise self._error("unterminated comment", start)
            if self.src.startswith("(*", self.pos):
                depth += 1
                self._advance(2)
            elif self.src.startswith("*)", self.pos):
                depth -= 1
                self._advance(2)
                if depth == 0:
                    return
            else:
                self._advance()

    def _escape(self) -> str:
        # positioned just after a backslash
        ch = self._peek()
        if ch in _ESCAPES:
            self._advance()
            return _ESCAPES[ch]
        if ch.isdigit():
            digits = self.src[self.pos:self.pos + 3]
            if len(digits) == 3 and digits.isdigit() and int(digits) < 256:
                self._advance(3)
                return chr(int(digits))
        raise self._error("illegal escape sequence")

    def tokens(self) -> list[Token]:
        out = []
        src = self.src
        while True:
            while self.pos < len(src):
                ch = src[self.pos]
                if ch in " \t\r\n":
                    self._advance()
                elif src.startswith("(*", self.pos):
                    self._skip_comment()
                else:
                    break
            if self.pos >= len(src):
                out.append(Token("EOF", None, self._span_from(self._mark())))
                return out
            mark = self._mark()
            ch = src[self.pos]
            if ch.isdigit():
                out.append(self._number(mark))
            elif ch == '"':
                out.append(self._string(mark))
            elif ch == "'":
                out.append(self._quote(mark))
            elif ch.isalpha() or (ch == "_" and _is_ident_char(self._peek(1))):
                out.append(self._ident(mark))
            elif ch == "#":
                raise self._error("character '#' is not allowed here")
            else:
                for sym in SYMBOLS:
                    if src.startswith(sym, self.pos):
                        self._advance(len(sym))
                        out.append(Token("SYM", sym, self._span_from(mark)))
                        break
                else:
                    raise self._error(f"illegal character {ch!r}")

    def _number(self, mark) -> Token:
        start = self.pos
        while self._peek().isdigit() or self._peek() == "_":
            self._advance()
        is_float = False
        if self._peek() == ".":
            is_float = True
            self._advance()
            while self._peek().isdigit() or self._peek() == "_":
                self._advance()
        if self._peek() in ("e", "E") and is_float:
            save = (self.pos, self.line, self.col)
            self._advance()
            if self._peek() in ("+", "-"):
                self._advance()
            if not self._peek().isdigit():
                self.pos, self.line, self.col = save
            else:
                while self._peek().isdigit():
                    self._advance()
        text = self.src[start:self.pos].replace("_", "")
        if self._peek().isalpha() or self._peek() == "_":
            raise self._error("invalid numeric literal", mark)
        if is_float:
            return Token("FLOAT", float(text), self._span_from(mark))
        return Token("INT", int(text), self._span_from(mark))

    def _string(self, mark) -> Token:
        self._advance()
        chars = []
        while True:
            ch = self._peek()
            if ch == "":
                raise self._error("unterminated string literal", mark)
            if ch == '"':
                self._advance()
                break
            if ch == "\\":
                self._advance()
                chars.append(self._escape())
            else:
                chars.append(ch)
                self._advance()
        return Token("STRING", "".join(chars), self._span_from(mark))

    def _quote(self, mark) -> Token:
        # 'c' or '\n' is a character literal, 'a is a type variable
        nxt = self._peek(1)
        if nxt == "\\":
            self._advance(2)
            value = self._escape()
            if self._peek() != "'":
                raise self._error("unterminated character literal", mark)
            self._advance()
            return Token("CHAR", value, self._span_from(mark))
        if nxt and self._peek(2) == "'":
            self._advance(3)
            return Token("CHAR", nxt, self._span_from(mark))
        if nxt.isalpha() or nxt == "_":
            self._advance()
            start = self.pos
            while self._peek().isalnum() or self._peek() == "_":
                self._advance()
            return Token("TYVAR", self.src[start:self.pos], self._span_from(mark))
        raise self._error("unexpected quote", mark)

    def _ident_chars(self) -> str:
        start = self.pos
        while _is_ident_char(self._peek()):
            self._advance()
        return self.src[start:self.pos]

    def _ident(self, mark) -> Token:
        word = self._ident_chars()
        if word[0].isupper():
            # dotted stdlib name such as List.map; there is no module system
            parts = [word]
            while self._peek() == "." and self._peek(1).isalpha():
                self._advance()
                part = self._ident_chars()
                parts.append(part)
                if part[0].islower() or part[0] == "_":
                    break
            if len(parts) == 1 or parts[-1][0].isupper():
                raise self._error(f"constructor {'.'.join(parts)} is not supported", mark)
            return Token("IDENT", ".".join(parts), self._span_from(mark))
        if word in KEYWORDS:
            return Token("KW", word, self._span_from(mark))
        return Token("IDENT", word, self._span_from(mark))


def tokenize(source: str, file: str = "<string>") -> list[Token]:
    return _Lexer(source, file).tokens()


# --- parser ----------------------------------------------------------------

# (left binding power, right associative)
BINARY_OPS = {
    ":=": (10, True),
    "||": (30, True),
    "&&": (35, True),
    "=": (40, False), "<": (40, False), ">": (40, False),
    "<=": (40, False), ">=": (40, False), "<>": (40, False),
    "^": (45, True), "@": (45, True),
    "::": (50, True),
    "+": (60, False), "-": (60, False), "+.": (60, False), "-.": (60, False),
    "*": (70, False), "/": (70, False), "*.": (70, False), "/.": (70, False),
    "mod": (70, False),
}
TUPLE_BP = 20
UNARY_MINUS_BP = 80
OPERATOR_NAMES = set(BINARY_OPS) | {"!", "~-", "~-."}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("SYM", "KW") and t.value == value

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error(f"expected '{value}'")
        return self.advance()

    def error(self, message: str) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(str(t.value))
        return ParseError(f"{message}, found {found}", t.span)

    def prev_span(self) -> Span:
        return self.toks[self.i - 1].span

    # program
    def program(self) -> list[TopDef]:
        defs = []
        while True:
            while self.at(";;"):
                self.advance()
            if self.tok.kind == "EOF":
                return defs
            if not self.at("let"):
                raise self.error("expected a top-level 'let' definition")
            start = self.advance().span
            is_rec, name, body = self.binding()
            if self.at("in"):
                raise self.error("unexpected 'in' after a top-level definition")
            defs.append(TopDef(is_rec, name, body, start.merge(body.span)))

    def binding(self) -> tuple[bool, str, Expr]:
        is_rec = False
        if self.at("rec"):
            self.advance()
            is_rec = True
        if self.tok.kind == "IDENT" and "." not in self.tok.value:
            name = self.advance().value
        elif self.at("_"):
            self.advance()
            name = "_"
        else:
            raise self.error("expected a variable name after 'let'")
        params = []
        while not self.at("="):
            params.append(self.simple_pattern())
        self.expect("=")
        body = self.seq()
        if params:
            _check_distinct(params)
            body = Fun(tuple(params), body, params[0].span.merge(body.span))
        return is_rec, name, body

    # expressions
    def seq(self) -> Expr:
        items = [self.expr(0)]
        while self.at(";") and self._starts_expr(self.peek()):
            self.advance()
            items.append(self.expr(0))
        if self.at(";") and not self._starts_expr(self.peek()):
            self.advance()  # trailing semicolon
        result = items[-1]
        for item in reversed(items[:-1]):
            result = Seq(item, result, item.span.merge(result.span))
        return result

    @staticmethod
    def _starts_expr(t: Token) -> bool:
        if t.kind in ("INT", "FLOAT", "STRING", "CHAR", "IDENT"):
            return True
        return t.value in ("(", "[", "!", "-", "-.", "let", "fun", "if",
                           "match", "while", "begin", "true", "false")

    def expr(self, min_bp: int) -> Expr:
        left = self.prefix()
        while True:
            t = self.tok
            if t.kind not in ("SYM", "KW"):
                break
            op = t.value
            if op == "," and TUPLE_BP >= min_bp:
                elems = [left]
                while self.at(","):
                    self.advance()
                    elems.append(self.expr(TUPLE_BP + 1))
                left = Tuple(tuple(elems), left.span.merge(elems[-1].span))
                continue
            if op not in BINARY_OPS:
                break
            lbp, right_assoc = BINARY_OPS[op]
            if lbp < min_bp:
                break
            self.advance()
            right = self.expr(lbp if right_assoc else lbp + 1)
            left = App(Var(op, t.span), (left, right), left.span.merge(right.span))
        return left

    def prefix(self) -> Expr:
        t = self.tok
        if t.kind == "SYM" and t.value in ("-", "-."):
            self.advance()
            nxt = self.tok
            if nxt.kind == "INT" and t.value == "-":
                self.advance()
                return ConstInt(-nxt.value, t.span.merge(nxt.span))
            if nxt.kind == "FLOAT":
                self.advance()
                return ConstFloat(-nxt.value, t.span.merge(nxt.span))
            operand = self.expr(UNARY_MINUS_BP)
            name = "~-" if t.value == "-" else "~-."
            return App(Var(name, t.span), (operand,), t.span.merge(operand.span))
        if t.kind == "KW":
            if t.value == "let":
                return self.let_in()
            if t.value == "fun":
                return self.fun()
            if t.value == "if":
                return self.if_()
            if t.value == "match":
                return self.match()
            if t.value == "while":
                return self.while_()
        return self.application()

    def let_in(self) -> Expr:
        start = self.advance().span
        is_rec, name, bound = self.binding()
        self.expect("in")
        body = self.seq()
        return Let(is_rec, name, bound, body, start.merge(body.span))

    def fun(self) -> Expr:
        start = self.advance().span
        params = []
        while not self.at("->"):
            params.append(self.simple_pattern())
        if not params:
            raise self.error("expected a parameter after 'fun'")
        _check_distinct(params)
        self.expect("->")
        body = self.seq()
        return Fun(tuple(params), body, start.merge(body.span))

    def if_(self) -> Expr:
        start = self.advance().span
        cond = self.seq()
        self.expect("then")
        then_b = self.expr(0)
        else_b = None
        end = then_b.span
        if self.at("else"):
            self.advance()
            else_b = self.expr(0)
            end = else_b.span
        return If(cond, then_b, else_b, start.merge(end))

    def match(self) -> Expr:
        start = self.advance().span
        scrutinee = self.seq()
        self.expect("with")
        if self.at("|"):
            self.advance()
        arms = []
        while True:
            pat = self.pattern()
            self.expect("->")
            body = self.seq()
            arms.append((pat, body))
            if not self.at("|"):
                break
            self.advance()
        return Match(scrutinee, tuple(arms), start.merge(arms[-1][1].span))

    def while_(self) -> Expr:
        start = self.advance().span
        cond = self.seq()
        self.expect("do")
        body = self.seq()
        end = self.expect("done").span
        return While(cond, body, start.merge(end))

    def _starts_simple(self) -> bool:
        t = self.tok
        if t.kind in ("INT", "FLOAT", "STRING", "CHAR", "IDENT"):
            return True
        return t.kind in ("SYM", "KW") and t.value in ("(", "[", "!", "begin", "true", "false")

    def application(self) -> Expr:
        head = self.simple()
        args = []
        while self._starts_simple():
            args.append(self.simple())
        if not args:
            return head
        span = head.span.merge(args[-1].span)
        if isinstance(head, App):
            return App(head.fn, head.args + tuple(args), span)
        return App(head, tuple(args), span)

    def simple(self) -> Expr:
        t = self.tok
        if t.kind == "IDENT":
            self.advance()
            return Var(t.value, t.span)
        if t.kind == "INT":
            self.advance()
            return ConstInt(t.value, t.span)
        if t.kind == "FLOAT":
            self.advance()
            return ConstFloat(t.value, t.span)
        if t.kind == "STRING":
            self.advance()
            return ConstString(t.value, t.span)
        if t.kind == "CHAR":
            self.advance()
            return ConstChar(t.value, t.span)
        if self.at("true") or self.at("false"):
            self.advance()
            return ConstBool(t.value == "true", t.span)
        if self.at("!"):
            self.advance()
            operand = self.simple()
            return App(Var("!", t.span), (operand,), t.span.merge(operand.span))
        if self.at("begin"):
            self.advance()
            if self.at("end"):
                return ConstUnit(t.span.merge(self.advance().span))
            inner = self.seq()
            self.expect("end")
            return inner
        if self.at("["):
            return self.list_literal()
        if self.at("("):
            return self.paren()
        raise self.error("expected an expression")

    def list_literal(self) -> Expr:
        start = self.advance().span
        elems = []
        while not self.at("]"):
            elems.append(self.expr(0))
            if self.at(";"):
                self.advance()
            elif not self.at("]"):
                raise self.error("expected ';' or ']' in list literal")
        end = self.advance().span
        return ListLit(tuple(elems), start.merge(end))

    def paren(self) -> Expr:
        start = self.advance().span
        if self.at(")"):
            return ConstUnit(start.merge(self.advance().span))
        t = self.tok
        if t.kind in ("SYM", "KW") and t.value in OPERATOR_NAMES and self.peek().value == ")" \
                and self.peek().kind == "SYM":
            self.advance()
            end = self.advance().span
            return Var(t.value, start.merge(end))
        inner = self.seq()
        if self.at(":"):
            self.advance()
            ty = _TypeParser(self).type_expr()
            end = self.expect(")").span
            return Annot(inner, ty, start.merge(end))
        self.expect(")")
        return inner

    # patterns
    def pattern(self) -> Pattern:
        first = self.cons_pattern()
        if not self.at(","):
            return first
        elems = [first]
        while self.at(","):
            self.advance()
            elems.append(self.cons_pattern())
        pat = PTuple(tuple(elems), first.span.merge(elems[-1].span))
        _check_distinct([pat])
        return pat

    def cons_pattern(self) -> Pattern:
        head = self.simple_pattern()
        if self.at("::"):
            self.advance()
            tail = self.cons_pattern()
            pat = PCons(head, tail, head.span.merge(tail.span))
            _check_distinct([pat])
            return pat
        return head

    def simple_pattern(self) -> Pattern:
        t = self.tok
        if t.kind == "IDENT":
            if "." in t.value:
                raise self.error("expected a pattern")
            self.advance()
            return PVar(t.value, t.span)
        if self.at("_"):
            self.advance()
            return PWildcard(t.span)
        if t.kind == "INT":
            self.advance()
            return PConstInt(t.value, t.span)
        if t.kind == "FLOAT":
            self.advance()
            return PConstFloat(t.value, t.span)
        if t.kind == "STRING":
            self.advance()
            return PConstString(t.value, t.span)
        if t.kind == "CHAR":
            self.advance()
            return PConstChar(t.value, t.span)
        if self.at("true") or self.at("false"):
            self.advance()
            return PConstBool(t.value == "true", t.span)
        if self.at("-") or self.at("-."):
            self.advance()
            nxt = self.tok
            if nxt.kind == "INT" and t.value == "-":
                self.advance()
                return PConstInt(-nxt.value, t.span.merge(nxt.span))
            if nxt.kind == "FLOAT":
                self.advance()
                return PConstFloat(-nxt.value, t.span.merge(nxt.span))
            raise self.error("expected a numeric literal in pattern")
        if self.at("("):
            start = self.advance().span
            if self.at(")"):
                return PConstUnit(start.merge(self.advance().span))
            inner = self.pattern()
            self.expect(")")
            return inner
        if self.at("["):
            start = self.advance().span
            elems = []
            while not self.at("]"):
                elems.append(self.pattern())
                if self.at(";"):
                    self.advance()
                elif not self.at("]"):
                    raise self.error("expected ';' or ']' in list pattern")
            end = self.advance().span
            result: Pattern = PNil(end)
            for elem in reversed(elems):
                result = PCons(elem, result, elem.span.merge(end))
            if not elems:
                result = PNil(start.merge(end))
            _check_distinct([result])
            return result
        raise self.error("expected a pattern")


class _TypeParser:
    """Type expressions: ``'a``, ``int``, ``t list``, ``t * t``, ``t -> t``."""

    def __init__(self, parser: _Parser):
        self.p = parser

    def type_expr(self) -> TypeExpr:
        left = self.tuple_type()
        if self.p.at("->"):
            self.p.advance()
            right = self.type_expr()
            return TEArrow(left, right, left.span.merge(right.span))
        return left

    def tuple_type(self) -> TypeExpr:
        first = self.app_type()
        if not self.p.at("*"):
            return first
        elems = [first]
        while self.p.at("*"):
            self.p.advance()
            elems.append(self.app_type())
        return TETuple(tuple(elems), first.span.merge(elems[-1].span))

    def app_type(self) -> TypeExpr:
        t = self.atom_type()
        while self.p.tok.kind == "IDENT":
            name_tok = self.p.advance()
            t = TEConstr(name_tok.value, (t,), t.span.merge(name_tok.span))
        return t

    def atom_type(self) -> TypeExpr:
        tok = self.p.tok
        if tok.kind == "TYVAR":
            self.p.advance()
            return TEVar(tok.value, tok.span)
        if tok.kind == "IDENT":
            self.p.advance()
            return TEConstr(tok.value, (), tok.span)
        if self.p.at("("):
            self.p.advance()
            inner = self.type_expr()
            self.p.expect(")")
            return inner
        raise self.p.error("expected a type")


def _pattern_vars(p: Pattern, out: list) -> None:
    if isinstance(p, PVar):
        out.append(p)
    elif isinstance(p, PTuple):
        for e in p.elems:
            _pattern_vars(e, out)
    elif isinstance(p, PCons):
        _pattern_vars(p.head, out)
        _pattern_vars(p.tail, out)


def _check_distinct(patterns) -> None:
    seen = set()
    found: list = []
    for p in patterns:
        _pattern_vars(p, found)
    for v in found:
        if v.name in seen:
            raise ParseError(f"variable {v.name} is bound several times in this matching", v.span)
        seen.add(v.name)


def parse_program(source: str, file: str = "<string>") -> list[TopDef]:
    """Parse a whole source file into its top-level definitions.

    Raises :class:`ParseError` (carrying a span) on malformed input.
    """
    parser = _Parser(tokenize(source, file))
    try:
        return parser.program()
    except RecursionError:
        raise ParseError("expression nested too deeply", parser.tok.span) from None


def parse_expr(source: str, file: str = "<string>") -> Expr:
    parser = _Parser(tokenize(source, file))
    e = parser.seq()
    if parser.tok.kind != "EOF":
        raise parser.error("unexpected token after expression")
    return e


def parse_type(source: str, file: str = "<type>") -> TypeExpr:
    parser = _Parser(tokenize(source, file))
    t = _TypeParser(parser).type_expr()
    if parser.tok.kind != "EOF":
        raise parser.error("unexpected token after type")
    return t


def iter_children(node):
    """Direct sub-nodes (expressions and patterns) of an AST node."""
    if isinstance(node, TopDef):
        yield node.body
    elif isinstance(node, Fun):
        yield from node.params
        yield node.body
    elif isinstance(node, App):
        yield node.fn
        yield from node.args
    elif isinstance(node, Let):
        yield node.bound
        yield node.body
    elif isinstance(node, If):
        yield node.cond
        yield node.then_branch
        if node.else_branch is not None:
            yield node.else_branch
    elif isinstance(node, Match):
        yield node.scrutinee
        for pat, body in node.arms:
            yield pat
            yield body
    elif isinstance(node, While):
        yield node.cond
        yield node.body
    elif isinstance(node, Seq):
        yield node.first
        yield node.second
    elif isinstance(node, (Tuple, ListLit, PTuple)):
        yield from node.elems
    elif isinstance(node, Annot):
        yield node.expr
    elif isinstance(node, PCons):
        yield node.head
        yield node.tail


# --- pretty-printer --------------------------------------------------------

_ATOM = 110
_BANG = 100
_APP = 90
_OPEN = 0  # let, fun, match, seq: extend as far right as possible
_IF = 1


def _escape_string(s: str, quote: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == quote:
            out.append("\\" + quote)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\b":
            out.append("\\b")
        elif ord(ch) < 32 or ord(ch) == 127:
            out.append(f"\\{ord(ch):03d}")
        else:
            out.append(ch)
    return "".join(out)


def _float_text(f: float) -> str:
    text = repr(f)
    if "." not in text:
        text = text.replace("e", ".e") if "e" in text else text + "."
    return text


def _op_var(name: str) -> str:
    return f"( {name} )"


def _pp(e: Expr) -> tuple[str, int]:
    if isinstance(e, Var):
        return (_op_var(e.name) if e.name in OPERATOR_NAMES else e.name), _ATOM
    if isinstance(e, ConstInt):
        return (f"({e.value})" if e.value < 0 else str(e.value)), _ATOM
    if isinstance(e, ConstFloat):
        text = _float_text(e.value)
        return (f"({text})" if text.startswith("-") else text), _ATOM
    if isinstance(e, ConstBool):
        return ("true" if e.value else "false"), _ATOM
    if isinstance(e, ConstString):
        return '"' + _escape_string(e.value, '"') + '"', _ATOM
    if isinstance(e, ConstChar):
        return "'" + _escape_string(e.value, "'") + "'", _ATOM
    if isinstance(e, ConstUnit):
        return "()", _ATOM
    if isinstance(e, Fun):
        params = " ".join(_pp_pattern_simple(p) for p in e.params)
        return f"fun {params} -> {_pp_at(e.body, _OPEN)}", _OPEN
    if isinstance(e, App):
        return _pp_app(e)
    if isinstance(e, Let):
        rec = "rec " if e.is_rec else ""
        return f"let {rec}{e.name} = {_pp_at(e.bound, _OPEN)} in {_pp_at(e.body, _OPEN)}", _OPEN
    if isinstance(e, If):
        cond = _pp_at(e.cond, _OPEN)
        if e.else_branch is None:
            return f"if {cond} then {_pp_at(e.then_branch, _IF)}", _IF
        then_b = e.then_branch
        then_text = (f"({pretty_expr(then_b)})"
                     if isinstance(then_b, If) and then_b.else_branch is None
                     else _pp_at(then_b, _IF))
        return f"if {cond} then {then_text} else {_pp_at(e.else_branch, _IF)}", _IF
    if isinstance(e, Match):
        arms = []
        for k, (pat, body) in enumerate(e.arms):
            last = k == len(e.arms) - 1
            body_text = _pp_at(body, _OPEN) if last else _pp_at(body, _IF)
            arms.append(f"| {pretty_pattern(pat)} -> {body_text}")
        return f"match {_pp_at(e.scrutinee, _OPEN)} with " + " ".join(arms), _OPEN
    if isinstance(e, While):
        return f"while {_pp_at(e.cond, _OPEN)} do {_pp_at(e.body, _OPEN)} done", _ATOM
    if isinstance(e, Seq):
        return f"{_pp_at(e.first, _IF)}; {_pp_at(e.second, _OPEN)}", _OPEN
    if isinstance(e, Tuple):
        return ", ".join(_pp_at(x, TUPLE_BP + 1) for x in e.elems), TUPLE_BP
    if isinstance(e, ListLit):
        return "[" + "; ".join(_pp_at(x, _IF) for x in e.elems) + "]", _ATOM
    if isinstance(e, Annot):
        return f"({_pp_at(e.expr, _OPEN)} : {pretty_type(e.ty)})", _ATOM
    raise TypeError(f"not an expression: {e!r}")


def _pp_app(e: App) -> tuple[str, int]:
    fn = e.fn
    if isinstance(fn, Var):
        name = fn.name
        if name in BINARY_OPS and len(e.args) == 2:
            lbp, right_assoc = BINARY_OPS[name]
            left = _pp_at(e.args[0], lbp + 1 if right_assoc else lbp)
            right = _pp_at(e.args[1], lbp if right_assoc else lbp + 1)
            return f"{left} {name} {right}", lbp
        if name == "!" and len(e.args) == 1:
            return "!" + _pp_at(e.args[0], _BANG), _BANG
        if name in ("~-", "~-.") and len(e.args) == 1:
            arg = e.args[0]
            sym = name[1:]
            if isinstance(arg, Var) and arg.name not in OPERATOR_NAMES:
                return f"{sym}{arg.name}", UNARY_MINUS_BP
            return f"{sym}({pretty_expr(arg)})", UNARY_MINUS_BP
    parts = [_pp_at(fn, _BANG)] + [_pp_at(a, _BANG) for a in e.args]
    return " ".join(parts), _APP


def _pp_at(e: Expr, min_prec: int) -> str:
    text, prec = _pp(e)
    # open-ended constructs must be closed off unless they are in tail position
    if prec < min_prec:
        return f"({text})"
    return text


def pretty_expr(e: Expr) -> str:
    """Render an expression as re-parsable surface syntax."""
    return _pp(e)[0]


def _pp_pattern(p: Pattern) -> tuple[str, int]:
    if isinstance(p, PVar):
        return p.name, _ATOM
    if isinstance(p, PWildcard):
        return "_", _ATOM
    if isinstance(p, PConstInt):
        return (f"({p.value})" if p.value < 0 else str(p.value)), _ATOM
    if isinstance(p, PConstFloat):
        text = _float_text(p.value)
        return (f"({text})" if text.startswith("-") else text), _ATOM
    if isinstance(p, PConstBool):
        return ("true" if p.value else "false"), _ATOM
    if isinstance(p, PConstString):
        return '"' + _escape_string(p.value, '"') + '"', _ATOM
    if isinstance(p, PConstChar):
        return "'" + _escape_string(p.value, "'") + "'", _ATOM
    if isinstance(p, PConstUnit):
        return "()", _ATOM
    if isinstance(p, PNil):
        return "[]", _ATOM
    if isinstance(p, PCons):
        head, hp = _pp_pattern(p.head)
        tail, tp = _pp_pattern(p.tail)
        head = head if hp > 50 else f"({head})"
        tail = tail if tp >= 50 else f"({tail})"
        return f"{head} :: {tail}", 50
    if isinstance(p, PTuple):
        parts = []
        for x in p.elems:
            text, prec = _pp_pattern(x)
            parts.append(text if prec > TUPLE_BP else f"({text})")
        return ", ".join(parts), TUPLE_BP
    raise TypeError(f"not a pattern: {p!r}")


def pretty_pattern(p: Pattern) -> str:
    return _pp_pattern(p)[0]


def _pp_pattern_simple(p: Pattern) -> str:
    text, prec = _pp_pattern(p)
    return text if prec == _ATOM else f"({text})"


def pretty_type(t: TypeExpr) -> str:
    if isinstance(t, TEVar):
        return "'" + t.name
    if isinstance(t, TEConstr):
        if not t.args:
            return t.name
        arg = t.args[0]
        inner = pretty_type(arg)
        if isinstance(arg, (TEArrow, TETuple)):
            inner = f"({inner})"
        return f"{inner} {t.name}"
    if isinstance(t, TEArrow):
        param = pretty_type(t.param)
        if isinstance(t.param, TEArrow):
            param = f"({param})"
        return f"{param} -> {pretty_type(t.result)}"
    if isinstance(t, TETuple):
        parts = []
        for x in t.elems:
            text = pretty_type(x)
            parts.append(f"({text})" if isinstance(x, (TEArrow, TETuple)) else text)
        return " * ".join(parts)
    raise TypeError(f"not a type expression: {t!r}")
