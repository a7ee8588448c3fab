"""Traditional left-to-right inference, expected types pushed inward.

Every expression is checked against the type its context expects, and the
first unification to fail is reported at the subterm being checked.  This
reproduces the usual bias: arguments are unified one by one against the
function's parameters, and an ``else`` branch is checked against whatever the
``then`` branch already fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import surface as S
from .diagnostics import (Diagnostic, GenericUnify, TypeCheckError,
                          UnboundVar)
from .rules import (const_type, ensure_recursion_limit, infer_pattern,
                    is_value, pattern_bindings, unify_or_fail)
from .tycore import (NamingContext, Scheme, Ty, TyArrow, TyConstr, TyEnv,
                     TyTuple, TyVar, arrows, fresh_var, generalize, initial_env,
                     instantiate, monomorphize, repr_ty, snapshot, t_bool,
                     t_list, t_unit, type_of_annotation)
from .unify import ConflictKind, UnifyConflict, unify

__all__ = ["ClassicChecker", "infer_classic", "check_program_classic",
           "ProgramOk", "FirstFailure", "check_def"]


@dataclass(frozen=True)
class ProgramOk:
    schemes: tuple  # of (name, Scheme)
    env: TyEnv


@dataclass(frozen=True)
class FirstFailure:
    index: int  # 1-based
    diagnostic: Diagnostic
    env: TyEnv  # environment in force before the failing definition


ProgramResult = Union[ProgramOk, FirstFailure]


class ClassicChecker:
    def __init__(self):
        self.annot_vars: dict = {}

    # -- entry points ----------------------------------------------------------

    def infer(self, env: TyEnv, e: S.Expr) -> Ty:
        t = fresh_var(env)
        self.check(env, e, t)
        return t

    def check(self, env: TyEnv, e: S.Expr, expected: Ty) -> None:
        method = getattr(self, "_check_" + type(e).__name__)
        method(env, e, expected)

    # -- leaves ----------------------------------------------------------------

    def _check_const(self, env, e, expected):
        unify_or_fail(const_type(e), expected, e.span)

    _check_ConstInt = _check_ConstFloat = _check_ConstBool = _check_const
    _check_ConstString = _check_ConstChar = _check_ConstUnit = _check_const

    def _check_Var(self, env, e: S.Var, expected):
        s = env.lookup(e.name)
        if s is None:
            raise TypeCheckError(Diagnostic(e.span, UnboundVar(e.name, False)))
        unify_or_fail(instantiate(s, env), expected, e.span)

    # -- compound forms ----------------------------------------------------------

    def _check_App(self, env, e: S.App, expected):
        t_fn = whole_fn = self.infer(env, e.fn)
        for arg in e.args:
            t = repr_ty(t_fn)
            if isinstance(t, TyVar):
                arrow = TyArrow(fresh_var(env), fresh_var(env))
                unify(t, arrow)
                t = arrow
            elif not isinstance(t, TyArrow):
                naming = NamingContext()
                whole = snapshot(whole_fn, naming)
                clash = snapshot(TyArrow(fresh_var(env), fresh_var(env)), naming)
                conflict = UnifyConflict(ConflictKind.MISMATCH, whole, clash, whole, clash)
                raise TypeCheckError(Diagnostic(
                    e.fn.span, GenericUnify(conflict, "too_many_args")))
            self.check(env, arg, t.param)
            t_fn = t.result
        unify_or_fail(t_fn, expected, e.span)

    def _check_Fun(self, env, e: S.Fun, expected):
        pairs: list = []
        params = [infer_pattern(env, p, pairs) for p in e.params]
        result = fresh_var(env)
        unify_or_fail(arrows(params, result), expected, e.span)
        self.check(env.bind_many(pattern_bindings(pairs)), e.body, result)

    def _check_Let(self, env, e: S.Let, expected):
        body_env = self.bind_let(env, e.is_rec, e.name, e.bound)
        self.check(body_env, e.body, expected)

    def _check_If(self, env, e: S.If, expected):
        self.check(env, e.cond, t_bool())
        if e.else_branch is None:
            self.check(env, e.then_branch, t_unit())
            unify_or_fail(t_unit(), expected, e.span)
        else:
            self.check(env, e.then_branch, expected)
            self.check(env, e.else_branch, expected)

    def _check_Match(self, env, e: S.Match, expected):
        t_scrut = self.infer(env, e.scrutinee)
        for pat, body in e.arms:
            pairs: list = []
            t_pat = infer_pattern(env, pat, pairs)
            unify_or_fail(t_pat, t_scrut, pat.span, hint="pattern")
            self.check(env.bind_many(pattern_bindings(pairs)), body, expected)

    def _check_While(self, env, e: S.While, expected):
        self.check(env, e.cond, t_bool())
        self.check(env, e.body, t_unit())
        unify_or_fail(t_unit(), expected, e.span)

    def _check_Seq(self, env, e: S.Seq, expected):
        while isinstance(e, S.Seq):
            self.check(env, e.first, t_unit())
            e = e.second
        self.check(env, e, expected)

    def _check_Tuple(self, env, e: S.Tuple, expected):
        elems = [fresh_var(env) for _ in e.elems]
        unify_or_fail(TyTuple(elems), expected, e.span)
        for x, t in zip(e.elems, elems):
            self.check(env, x, t)

    def _check_ListLit(self, env, e: S.ListLit, expected):
        elem = fresh_var(env)
        conflict = unify(t_list(elem), expected)
        if conflict is not None:
            target = repr_ty(expected)
            hint = None
            if isinstance(target, TyConstr) and target.name != "list":
                hint = "no_constructor:" + ("::" if e.elems else "[]")
            raise TypeCheckError(Diagnostic(e.span, GenericUnify(conflict, hint)))
        for x in e.elems:
            self.check(env, x, elem)

    def _check_Annot(self, env, e: S.Annot, expected):
        t = type_of_annotation(e.ty, env, self.annot_vars)
        self.check(env, e.expr, t)
        unify_or_fail(t, expected, e.span)

    # -- let-bindings --------------------------------------------------------------

    def bind_let(self, env: TyEnv, is_rec: bool, name: str, bound: S.Expr) -> TyEnv:
        scheme = self.let_scheme(env, is_rec, name, bound)
        return env if name == "_" else env.bind(name, scheme)

    def let_scheme(self, env: TyEnv, is_rec: bool, name: str, bound: S.Expr) -> Scheme:
        inner = env.enter()
        if is_rec:
            v = fresh_var(inner)
            self.check(inner.bind(name, Scheme.mono(v)), bound, v)
            t = v
        else:
            t = self.infer(inner.with_shadow(name) if name != "_" else inner, bound)
        return generalize(env, t) if is_value(bound) else monomorphize(env, t)


def infer_classic(env: TyEnv, e: S.Expr) -> Ty:
    """Principal type of ``e`` under ``env``; raises :class:`TypeCheckError`."""
    ensure_recursion_limit()
    return ClassicChecker().infer(env, e)


def check_def(checker_cls, env: TyEnv, d: S.TopDef) -> Scheme:
    return checker_cls().let_scheme(env, d.is_rec, d.name, d.body)


def check_program_classic(prog: list, env: Optional[TyEnv] = None) -> ProgramResult:
    """Check definitions in order; stop at the first one that fails."""
    ensure_recursion_limit()
    env = env if env is not None else initial_env()
    schemes = []
    for index, d in enumerate(prog, start=1):
        try:
            scheme = check_def(ClassicChecker, env, d)
        except TypeCheckError as err:
            return FirstFailure(index, err.diagnostic, env)
        if d.name != "_":
            env = env.bind(d.name, scheme)
            schemes.append((d.name, scheme))
    return ProgramOk(tuple(schemes), env)
