"""Type terms with mutable unification variables, schemes and snapshots.

Unification variables carry a let-level; generalization quantifies exactly
the variables whose level is deeper than the environment's current level.
Snapshots (:class:`DisplayTy`) are immutable deep copies used for reporting.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from . import surface as S

__all__ = [
    "Ty", "TyVar", "TyArrow", "TyConstr", "TyTuple", "Scheme", "TyEnv",
    "DVar", "DArrow", "DConstr", "DTuple", "DisplayTy", "NamingContext",
    "CONSTRUCTOR_ARITY", "fresh_var", "repr_ty", "walk", "generalize",
    "monomorphize", "instantiate", "snapshot", "render", "initial_env",
    "type_of_annotation", "display_of_type_expr", "copy_env", "arrows",
    "t_int", "t_float", "t_bool", "t_string", "t_char", "t_unit", "t_list",
    "t_ref", "free_vars",
]

CONSTRUCTOR_ARITY = {
    "int": 0, "float": 0, "bool": 0, "string": 0, "char": 0, "unit": 0,
    "list": 1, "ref": 1,
}

_ids = itertools.count(1)


class Ty:
    __slots__ = ()

    def __str__(self) -> str:
        return render(snapshot(self, NamingContext()))


class TyVar(Ty):
    __slots__ = ("id", "level", "link")

    def __init__(self, level: int):
        self.id = next(_ids)
        self.level = level
        self.link: Optional[Ty] = None

    def __repr__(self) -> str:
        if self.link is not None:
            return f"TyVar({self.id}->{self.link!r})"
        return f"TyVar({self.id}@{self.level})"


class TyArrow(Ty):
    __slots__ = ("param", "result")

    def __init__(self, param: Ty, result: Ty):
        self.param = param
        self.result = result

    def __repr__(self) -> str:
        return f"TyArrow({self.param!r}, {self.result!r})"


class TyConstr(Ty):
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple[Ty, ...] = ()):
        if CONSTRUCTOR_ARITY.get(name) != len(args):
            raise ValueError(f"bad type constructor {name}/{len(args)}")
        self.name = name
        self.args = tuple(args)

    def __repr__(self) -> str:
        return f"TyConstr({self.name!r}, {self.args!r})"


class TyTuple(Ty):
    __slots__ = ("elems",)

    def __init__(self, elems):
        elems = tuple(elems)
        if len(elems) < 2:
            raise ValueError("tuple types have at least two components")
        self.elems = elems

    def __repr__(self) -> str:
        return f"TyTuple({self.elems!r})"


# nullary constructors are immutable and can be shared
_INT, _FLOAT, _BOOL = TyConstr("int"), TyConstr("float"), TyConstr("bool")
_STRING, _CHAR, _UNIT = TyConstr("string"), TyConstr("char"), TyConstr("unit")


def t_int() -> Ty: return _INT
def t_float() -> Ty: return _FLOAT
def t_bool() -> Ty: return _BOOL
def t_string() -> Ty: return _STRING
def t_char() -> Ty: return _CHAR
def t_unit() -> Ty: return _UNIT
def t_list(t: Ty) -> Ty: return TyConstr("list", (t,))
def t_ref(t: Ty) -> Ty: return TyConstr("ref", (t,))


def arrows(params, result: Ty) -> Ty:
    for p in reversed(list(params)):
        result = TyArrow(p, result)
    return result


@dataclass(frozen=True)
class Scheme:
    quantified: frozenset
    body: Ty

    @staticmethod
    def mono(t: Ty) -> "Scheme":
        return Scheme(frozenset(), t)


@dataclass(frozen=True)
class TyEnv:
    """Typing environment.

    ``shadows`` holds ``#name`` markers for the non-recursive ``let`` whose
    right-hand side is being checked; ``#`` is rejected by the lexer so the
    markers never collide with user names.
    """

    bindings: Mapping[str, Scheme] = field(default_factory=dict)
    shadows: frozenset = frozenset()
    current_level: int = 0

    def lookup(self, name: str) -> Optional[Scheme]:
        return self.bindings.get(name)

    def bind(self, name: str, scheme: Scheme) -> "TyEnv":
        new = dict(self.bindings)
        new[name] = scheme
        return TyEnv(new, self.shadows, self.current_level)

    def bind_many(self, items) -> "TyEnv":
        new = dict(self.bindings)
        new.update(items)
        return TyEnv(new, self.shadows, self.current_level)

    def with_shadow(self, name: str) -> "TyEnv":
        return TyEnv(self.bindings, self.shadows | {"#" + name}, self.current_level)

    def has_shadow(self, name: str) -> bool:
        return "#" + name in self.shadows

    def enter(self) -> "TyEnv":
        return TyEnv(self.bindings, self.shadows, self.current_level + 1)


def fresh_var(env: TyEnv) -> TyVar:
    return TyVar(env.current_level)


def repr_ty(t: Ty) -> Ty:
    """End of the link chain, compressing the path behind it."""
    if not isinstance(t, TyVar) or t.link is None:
        return t
    end = t
    while isinstance(end, TyVar) and end.link is not None:
        end = end.link
    while t is not end:
        nxt = t.link
        t.link = end
        t = nxt
    return end


def walk(t: Ty) -> Ty:
    """Like :func:`repr_ty` but leaves the links untouched."""
    while isinstance(t, TyVar) and t.link is not None:
        t = t.link
    return t


def free_vars(t: Ty) -> Iterator[TyVar]:
    """Unlinked variables reachable from ``t`` (with repetitions)."""
    stack = [t]
    while stack:
        t = walk(stack.pop())
        if isinstance(t, TyVar):
            yield t
        elif isinstance(t, TyArrow):
            stack.append(t.result)
            stack.append(t.param)
        elif isinstance(t, TyConstr):
            stack.extend(reversed(t.args))
        elif isinstance(t, TyTuple):
            stack.extend(reversed(t.elems))


def generalize(env: TyEnv, t: Ty) -> Scheme:
    quantified = frozenset(v.id for v in free_vars(t) if v.level > env.current_level)
    return Scheme(quantified, t)


def monomorphize(env: TyEnv, t: Ty) -> Scheme:
    """Bind without quantifying: pull inner-level variables out to ``env``'s level."""
    for v in free_vars(t):
        if v.level > env.current_level:
            v.level = env.current_level
    return Scheme.mono(t)


def instantiate(s: Scheme, env: TyEnv) -> Ty:
    if not s.quantified:
        return s.body
    mapping: dict[int, TyVar] = {}

    def copy(t: Ty) -> Ty:
        t = walk(t)
        if isinstance(t, TyVar):
            if t.id not in s.quantified:
                return t
            v = mapping.get(t.id)
            if v is None:
                v = mapping[t.id] = fresh_var(env)
            return v
        if isinstance(t, TyArrow):
            return TyArrow(copy(t.param), copy(t.result))
        if isinstance(t, TyConstr):
            return TyConstr(t.name, tuple(copy(a) for a in t.args)) if t.args else t
        return TyTuple(copy(e) for e in t.elems)

    return copy(s.body)


def copy_env(env: TyEnv) -> TyEnv:
    """Deep-copy every scheme into fresh type variables (a new session).

    Variables shared between schemes stay shared in the copy.
    """
    mapping: dict[int, TyVar] = {}

    def copy(t: Ty) -> Ty:
        t = walk(t)
        if isinstance(t, TyVar):
            v = mapping.get(t.id)
            if v is None:
                v = mapping[t.id] = TyVar(0)
            return v
        if isinstance(t, TyArrow):
            return TyArrow(copy(t.param), copy(t.result))
        if isinstance(t, TyConstr):
            return TyConstr(t.name, tuple(copy(a) for a in t.args)) if t.args else t
        return TyTuple(copy(e) for e in t.elems)

    bindings = {}
    for name, s in env.bindings.items():
        body = copy(s.body)
        quantified = frozenset(mapping[i].id for i in s.quantified if i in mapping)
        bindings[name] = Scheme(quantified, body)
    return TyEnv(bindings, env.shadows, 0)


# --- snapshots ---------------------------------------------------------------

@dataclass(frozen=True)
class DVar:
    name: str  # without the leading quote

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class DArrow:
    param: "DisplayTy"
    result: "DisplayTy"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class DConstr:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class DTuple:
    elems: tuple

    def __str__(self) -> str:
        return render(self)


DisplayTy = Union[DVar, DArrow, DConstr, DTuple]


def _var_names() -> Iterator[str]:
    for n in itertools.count():
        for letter in string.ascii_lowercase:
            yield letter if n == 0 else f"{letter}{n}"


class NamingContext:
    """Assigns 'a, 'b, ... to type variables in order of first occurrence."""

    def __init__(self):
        self._names: dict[int, str] = {}
        self._supply = _var_names()

    def name_for(self, v: TyVar) -> str:
        name = self._names.get(v.id)
        if name is None:
            name = self._names[v.id] = next(self._supply)
        return name


def snapshot(t: Ty, naming: NamingContext) -> DisplayTy:
    t = repr_ty(t)
    if isinstance(t, TyVar):
        return DVar(naming.name_for(t))
    if isinstance(t, TyArrow):
        param = snapshot(t.param, naming)
        return DArrow(param, snapshot(t.result, naming))
    if isinstance(t, TyConstr):
        return DConstr(t.name, tuple(snapshot(a, naming) for a in t.args))
    return DTuple(tuple(snapshot(e, naming) for e in t.elems))


def render(d: DisplayTy) -> str:
    """Arrows associate to the right; constructor arguments that are arrows or
    tuples, and arrows or tuples inside tuples, are parenthesized."""
    if isinstance(d, DVar):
        return "'" + d.name
    if isinstance(d, DConstr):
        if not d.args:
            return d.name
        arg = d.args[0]
        inner = render(arg)
        if isinstance(arg, (DArrow, DTuple)):
            inner = f"({inner})"
        return f"{inner} {d.name}"
    if isinstance(d, DArrow):
        param = render(d.param)
        if isinstance(d.param, DArrow):
            param = f"({param})"
        return f"{param} -> {render(d.result)}"
    parts = []
    for e in d.elems:
        text = render(e)
        parts.append(f"({text})" if isinstance(e, (DArrow, DTuple)) else text)
    return " * ".join(parts)


def display_of_type_expr(te: S.TypeExpr) -> DisplayTy:
    if isinstance(te, S.TEVar):
        return DVar(te.name)
    if isinstance(te, S.TEConstr):
        return DConstr(te.name, tuple(display_of_type_expr(a) for a in te.args))
    if isinstance(te, S.TEArrow):
        return DArrow(display_of_type_expr(te.param), display_of_type_expr(te.result))
    return DTuple(tuple(display_of_type_expr(e) for e in te.elems))


def type_of_annotation(te: S.TypeExpr, env: TyEnv, var_map: dict) -> Ty:
    """Convert a written type; named variables are looked up in (and added to)
    ``var_map`` so that repeated names denote the same variable."""
    if isinstance(te, S.TEVar):
        v = var_map.get(te.name)
        if v is None:
            v = var_map[te.name] = fresh_var(env)
        return v
    if isinstance(te, S.TEConstr):
        if CONSTRUCTOR_ARITY.get(te.name) != len(te.args):
            raise ValueError(f"unknown type constructor {te.name}")
        return TyConstr(te.name, tuple(type_of_annotation(a, env, var_map) for a in te.args))
    if isinstance(te, S.TEArrow):
        return TyArrow(type_of_annotation(te.param, env, var_map),
                       type_of_annotation(te.result, env, var_map))
    return TyTuple(type_of_annotation(e, env, var_map) for e in te.elems)


# --- initial environment -------------------------------------------------------

_STDLIB = """
+ : int -> int -> int
- : int -> int -> int
* : int -> int -> int
/ : int -> int -> int
mod : int -> int -> int
~- : int -> int
+. : float -> float -> float
-. : float -> float -> float
*. : float -> float -> float
/. : float -> float -> float
~-. : float -> float
= : 'a -> 'a -> bool
<> : 'a -> 'a -> bool
< : 'a -> 'a -> bool
> : 'a -> 'a -> bool
<= : 'a -> 'a -> bool
>= : 'a -> 'a -> bool
&& : bool -> bool -> bool
|| : bool -> bool -> bool
not : bool -> bool
^ : string -> string -> string
@ : 'a list -> 'a list -> 'a list
:: : 'a -> 'a list -> 'a list
[] : 'a list
ref : 'a -> 'a ref
! : 'a ref -> 'a
:= : 'a ref -> 'a -> unit
fst : 'a * 'b -> 'a
snd : 'a * 'b -> 'b
ignore : 'a -> unit
failwith : string -> 'a
abs : int -> int
max : 'a -> 'a -> 'a
min : 'a -> 'a -> 'a
succ : int -> int
pred : int -> int
sqrt : float -> float
float_of_int : int -> float
int_of_float : float -> int
string_of_int : int -> string
int_of_string : string -> int
string_of_float : float -> string
read_int : unit -> int
read_line : unit -> string
print_int : int -> unit
print_float : float -> unit
print_string : string -> unit
print_endline : string -> unit
print_char : char -> unit
print_newline : unit -> unit
List.map : ('a -> 'b) -> 'a list -> 'b list
List.iter : ('a -> unit) -> 'a list -> unit
List.fold_left : ('a -> 'b -> 'a) -> 'a -> 'b list -> 'a
List.fold_right : ('a -> 'b -> 'b) -> 'a list -> 'b -> 'b
List.filter : ('a -> bool) -> 'a list -> 'a list
List.length : 'a list -> int
List.rev : 'a list -> 'a list
List.hd : 'a list -> 'a
List.tl : 'a list -> 'a list
List.nth : 'a list -> int -> 'a
List.mem : 'a -> 'a list -> bool
List.append : 'a list -> 'a list -> 'a list
List.concat : 'a list list -> 'a list
String.length : string -> int
String.index : string -> char -> int
String.get : string -> int -> char
String.make : int -> char -> string
String.concat : string -> string list -> string
"""


def _scheme_of(te: S.TypeExpr) -> Scheme:
    var_map: dict = {}
    body = type_of_annotation(te, TyEnv(current_level=1), var_map)
    return Scheme(frozenset(v.id for v in var_map.values()), body)


# parsed once; each environment still gets its own type terms
_STDLIB_TYPES = []
for _line in _STDLIB.strip().splitlines():
    _name, _, _text = _line.partition(" : ")
    _STDLIB_TYPES.append((_name, S.parse_type(_text)))


def initial_env() -> TyEnv:
    """A level-0 environment holding the standard library names."""
    return TyEnv({name: _scheme_of(te) for name, te in _STDLIB_TYPES})
