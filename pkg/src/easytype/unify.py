"""Destructive first-order unification over :mod:`easytype.tycore` terms.

Failures are returned as :class:`UnifyConflict` values rather than raised, so
callers can decide how to phrase them.  There is no undo log: a failed
unification may leave some links in place.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .tycore import (DisplayTy, NamingContext, Ty, TyArrow, TyConstr, TyTuple,
                     TyVar, repr_ty, snapshot, walk)

__all__ = ["ConflictKind", "UnifyConflict", "Decomposition", "unify", "occurs",
           "arrow_decompose"]


class ConflictKind(enum.Enum):
    MISMATCH = "mismatch"
    OCCURS_CHECK = "occurs_check"


@dataclass(frozen=True)
class UnifyConflict:
    kind: ConflictKind
    left: DisplayTy
    right: DisplayTy
    whole_left: DisplayTy
    whole_right: DisplayTy


class _Clash(Exception):
    def __init__(self, kind: ConflictKind, left: Ty, right: Ty):
        self.kind = kind
        self.left = left
        self.right = right


def occurs(v: TyVar, t: Ty) -> bool:
    stack = [t]
    while stack:
        t = walk(stack.pop())
        if t is v:
            return True
        if isinstance(t, TyArrow):
            stack.append(t.param)
            stack.append(t.result)
        elif isinstance(t, TyConstr):
            stack.extend(t.args)
        elif isinstance(t, TyTuple):
            stack.extend(t.elems)
    return False


def _link(v: TyVar, t: Ty, var_is_left: bool) -> None:
    # occurs check and level lowering in one pass over t
    stack = [t]
    while stack:
        u = repr_ty(stack.pop())
        if u is v:
            left, right = (v, t) if var_is_left else (t, v)
            raise _Clash(ConflictKind.OCCURS_CHECK, left, right)
        if isinstance(u, TyVar):
            if u.level > v.level:
                u.level = v.level
        elif isinstance(u, TyArrow):
            stack.append(u.param)
            stack.append(u.result)
        elif isinstance(u, TyConstr):
            stack.extend(u.args)
        elif isinstance(u, TyTuple):
            stack.extend(u.elems)
    v.link = t


def _unify(a: Ty, b: Ty) -> None:
    a = repr_ty(a)
    b = repr_ty(b)
    if a is b:
        return
    if isinstance(a, TyVar):
        _link(a, b, var_is_left=True)
    elif isinstance(b, TyVar):
        _link(b, a, var_is_left=False)
    elif isinstance(a, TyArrow) and isinstance(b, TyArrow):
        _unify(a.param, b.param)
        _unify(a.result, b.result)
    elif isinstance(a, TyConstr) and isinstance(b, TyConstr) and a.name == b.name:
        for x, y in zip(a.args, b.args):
            _unify(x, y)
    elif isinstance(a, TyTuple) and isinstance(b, TyTuple) and len(a.elems) == len(b.elems):
        for x, y in zip(a.elems, b.elems):
            _unify(x, y)
    else:
        raise _Clash(ConflictKind.MISMATCH, a, b)


def unify(t1: Ty, t2: Ty, naming: Optional[NamingContext] = None) -> Optional[UnifyConflict]:
    """Unify ``t1`` with ``t2`` in place.

    Returns ``None`` on success.  On failure returns a conflict whose
    ``left``/``right`` are the innermost clashing subterms (``left`` drawn
    from ``t1``) and whose ``whole_*`` fields are the two operands, all
    snapshotted at failure time under one naming context.
    """
    try:
        _unify(t1, t2)
    except _Clash as clash:
        naming = naming or NamingContext()
        whole_left = snapshot(t1, naming)
        whole_right = snapshot(t2, naming)
        return UnifyConflict(clash.kind, snapshot(clash.left, naming),
                             snapshot(clash.right, naming), whole_left, whole_right)
    return None


@dataclass(frozen=True)
class Decomposition:
    params: tuple
    ret: Ty
    shortfall: int
    ret_is_var: bool


def arrow_decompose(t: Ty, n: int) -> Decomposition:
    """Peel up to ``n`` arrows off ``t`` without touching any link."""
    if n < 1:
        raise ValueError("arity must be at least 1")
    params = []
    t = walk(t)
    while len(params) < n and isinstance(t, TyArrow):
        params.append(t.param)
        t = walk(t.result)
    shortfall = n - len(params)
    return Decomposition(tuple(params), t, shortfall, shortfall > 0 and isinstance(t, TyVar))
