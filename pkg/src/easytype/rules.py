"""Pieces of the typing rules shared by both inference orders."""

from __future__ import annotations

import sys
from typing import Iterable, Optional

from . import surface as S
from .diagnostics import Diagnostic, GenericUnify, TypeCheckError
from .tycore import (CONSTRUCTOR_ARITY, NamingContext, Scheme, Ty, TyEnv,
                     TyTuple, TyVar, fresh_var, render, snapshot, t_bool,
                     t_char, t_float, t_int, t_list, t_string, t_unit)
from .unify import unify

__all__ = ["const_type", "is_value", "infer_pattern", "render_scheme",
           "validate_annotations", "ensure_recursion_limit", "unify_or_fail"]

_RECURSION_LIMIT = 50_000


def ensure_recursion_limit() -> None:
    # let-chains of several hundred lines recurse a few frames per level
    if sys.getrecursionlimit() < _RECURSION_LIMIT:
        sys.setrecursionlimit(_RECURSION_LIMIT)


def const_type(e) -> Ty:
    if isinstance(e, (S.ConstInt, S.PConstInt)):
        return t_int()
    if isinstance(e, (S.ConstFloat, S.PConstFloat)):
        return t_float()
    if isinstance(e, (S.ConstBool, S.PConstBool)):
        return t_bool()
    if isinstance(e, (S.ConstString, S.PConstString)):
        return t_string()
    if isinstance(e, (S.ConstChar, S.PConstChar)):
        return t_char()
    if isinstance(e, (S.ConstUnit, S.PConstUnit)):
        return t_unit()
    raise TypeError(f"not a constant: {e!r}")


_CONSTS = (S.ConstInt, S.ConstFloat, S.ConstBool, S.ConstString, S.ConstChar,
           S.ConstUnit)


def is_value(e: S.Expr) -> bool:
    """Syntactic values, the only expressions whose type is generalized."""
    if isinstance(e, (S.Var, S.Fun) + _CONSTS):
        return True
    if isinstance(e, (S.Tuple, S.ListLit)):
        return all(is_value(x) for x in e.elems)
    if isinstance(e, S.App):
        return (isinstance(e.fn, S.Var) and e.fn.name == "::"
                and all(is_value(a) for a in e.args))
    if isinstance(e, S.Annot):
        return is_value(e.expr)
    if isinstance(e, S.Let):
        return is_value(e.bound) and is_value(e.body)
    return False


def unify_or_fail(actual: Ty, expected: Ty, span: S.Span, hint=None) -> None:
    conflict = unify(actual, expected)
    if conflict is not None:
        raise TypeCheckError(Diagnostic(span, GenericUnify(conflict, hint)))


def infer_pattern(env: TyEnv, p: S.Pattern, out: list) -> Ty:
    """Type of pattern ``p``; its variables are appended to ``out`` as
    ``(name, type)`` pairs.  Clashes inside the pattern are raised at the
    offending sub-pattern."""
    if isinstance(p, S.PVar):
        v = fresh_var(env)
        out.append((p.name, v))
        return v
    if isinstance(p, S.PWildcard):
        return fresh_var(env)
    if isinstance(p, S.PTuple):
        return TyTuple(infer_pattern(env, q, out) for q in p.elems)
    if isinstance(p, S.PNil):
        return t_list(fresh_var(env))
    if isinstance(p, S.PCons):
        head = infer_pattern(env, p.head, out)
        tail = infer_pattern(env, p.tail, out)
        unify_or_fail(tail, t_list(head), p.tail.span, hint="pattern")
        return tail
    return const_type(p)


def pattern_bindings(pairs: Iterable) -> dict:
    return {name: Scheme.mono(t) for name, t in pairs}


class _SchemeNaming(NamingContext):
    """Quantified variables print as 'a, 'b, ...; the rest as '_weakN."""

    def __init__(self, quantified: frozenset, weak: dict):
        super().__init__()
        self._quantified = quantified
        self._weak = weak

    def name_for(self, v: TyVar) -> str:
        if v.id in self._quantified:
            return super().name_for(v)
        name = self._weak.get(v.id)
        if name is None:
            name = self._weak[v.id] = f"_weak{len(self._weak) + 1}"
        return name


def render_scheme(s: Scheme, weak_names: Optional[dict] = None) -> str:
    """Pass one ``weak_names`` dict across a listing so that a weak variable
    shared by several schemes keeps one name."""
    weak = weak_names if weak_names is not None else {}
    return render(snapshot(s.body, _SchemeNaming(s.quantified, weak)))


def _check_type_expr(te: S.TypeExpr) -> None:
    if isinstance(te, S.TEConstr):
        if CONSTRUCTOR_ARITY.get(te.name) != len(te.args):
            if te.name in CONSTRUCTOR_ARITY:
                msg = (f"the type constructor {te.name} expects "
                       f"{CONSTRUCTOR_ARITY[te.name]} argument(s)")
            else:
                msg = f"unbound type constructor {te.name}"
            raise S.ParseError(msg, te.span)
        for a in te.args:
            _check_type_expr(a)
    elif isinstance(te, S.TEArrow):
        _check_type_expr(te.param)
        _check_type_expr(te.result)
    elif isinstance(te, S.TETuple):
        for e in te.elems:
            _check_type_expr(e)


def validate_annotations(prog: list) -> None:
    """Reject annotations naming unknown type constructors (as a ParseError)."""
    stack = [d.body for d in prog]
    while stack:
        node = stack.pop()
        if isinstance(node, S.Annot):
            _check_type_expr(node.ty)
        stack.extend(S.iter_children(node))
