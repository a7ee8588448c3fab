"""Bottom-up inference that delays unification until all operands are typed.

Arguments of an application and the branches of a conditional or match are
inferred independently, snapshotted, and only then unified with each other,
so a clash can be reported with every participant's own type rather than
with types already bent by earlier operands.  Diagnostics raised here also
carry the missing ``()`` / ``!`` / ``rec`` suggestions.
"""

from __future__ import annotations

from typing import Optional

from . import surface as S
from .diagnostics import (AppMismatch, ArgRow, BranchMismatch, BranchReport,
                          Diagnostic, GenericUnify, IllTypedApp, MissingBang,
                          MissingElse, MissingRec, MissingUnit, Role,
                          SubexprMismatch, Suggestion, TooManyArgs,
                          TypeCheckError, UnboundVar)
from .infer_classic import FirstFailure, ProgramOk, ProgramResult, check_def
from .rules import (const_type, ensure_recursion_limit, infer_pattern,
                    is_value, pattern_bindings)
from .tycore import (DArrow, DConstr, DisplayTy, DTuple, DVar, NamingContext,
                     Scheme, Ty, TyArrow, TyConstr, TyEnv, TyTuple, TyVar,
                     arrows, fresh_var, generalize, initial_env, instantiate,
                     monomorphize, snapshot, t_bool, t_list, t_unit,
                     type_of_annotation, walk)
from .unify import UnifyConflict, arrow_decompose, unify

__all__ = ["EasyChecker", "infer_easy", "check_program_easy",
           "detect_missing_unit", "detect_missing_bang", "lookup_with_shadow"]

_ROLE_REQUIRED = {
    Role.WHILE_CONDITION: t_bool,
    Role.IF_CONDITION: t_bool,
    Role.WHILE_BODY: t_unit,
    Role.SEQ_LEFT: t_unit,
}


# --- suggestion detectors ----------------------------------------------------------

def _scratch(d: DisplayTy, names: dict) -> Ty:
    """A fresh, session-independent term for a snapshot."""
    if isinstance(d, DVar):
        v = names.get(d.name)
        if v is None:
            v = names[d.name] = TyVar(0)
        return v
    if isinstance(d, DArrow):
        return TyArrow(_scratch(d.param, names), _scratch(d.result, names))
    if isinstance(d, DConstr):
        return TyConstr(d.name, tuple(_scratch(a, names) for a in d.args))
    return TyTuple(_scratch(e, names) for e in d.elems)


def _would_unify(a: DisplayTy, b: DisplayTy) -> bool:
    names: dict = {}
    return unify(_scratch(a, names), _scratch(b, names)) is None


def _pairs(c: UnifyConflict):
    yield c.whole_left, c.whole_right
    yield c.left, c.right


def _is_unit(d: DisplayTy) -> bool:
    return isinstance(d, DConstr) and d.name == "unit"


def detect_missing_unit(c: UnifyConflict, expected_is_unit_context: bool) -> Optional[MissingUnit]:
    """``unit -> t`` where ``t`` was wanted: a call lacking its ``()``."""
    for a, b in _pairs(c):
        for fn, other in ((a, b), (b, a)):
            if (isinstance(fn, DArrow) and _is_unit(fn.param)
                    and not isinstance(other, DVar) and _would_unify(fn.result, other)):
                return MissingUnit(expected_is_unit_context)
    return None


def detect_missing_bang(c: UnifyConflict) -> Optional[MissingBang]:
    """``t ref`` where ``t`` was wanted: a dereference was left out."""
    for a, b in _pairs(c):
        for ref, other in ((a, b), (b, a)):
            if (isinstance(ref, DConstr) and ref.name == "ref"
                    and not isinstance(other, DVar) and _would_unify(ref.args[0], other)):
                return MissingBang()
    return None


def _suggestions(c: Optional[UnifyConflict], unit_context: bool) -> tuple:
    if c is None:
        return ()
    found: list[Suggestion] = []
    for s in (detect_missing_unit(c, unit_context), detect_missing_bang(c)):
        if s is not None:
            found.append(s)
    return tuple(found)


def lookup_with_shadow(env: TyEnv, name: str, span: S.Span) -> Scheme:
    s = env.lookup(name)
    if s is not None:
        return s
    missing_rec = env.has_shadow(name)
    suggestions = (MissingRec(name),) if missing_rec else ()
    raise TypeCheckError(Diagnostic(span, UnboundVar(name, missing_rec), suggestions))


# --- checker ---------------------------------------------------------------------

def _fail(span, payload, conflict=None, unit_context=False):
    raise TypeCheckError(Diagnostic(span, payload, _suggestions(conflict, unit_context)))


def _fn_name(e: S.Expr) -> Optional[str]:
    return e.name if isinstance(e, S.Var) else None


def _spans_merge(spans) -> S.Span:
    spans = list(spans)
    out = spans[0]
    for s in spans[1:]:
        out = out.merge(s)
    return out


class EasyChecker:
    def __init__(self):
        self.annot_vars: dict = {}

    def infer(self, env: TyEnv, e: S.Expr) -> Ty:
        return getattr(self, "_infer_" + type(e).__name__)(env, e)

    def _infer_const(self, env, e):
        return const_type(e)

    _infer_ConstInt = _infer_ConstFloat = _infer_ConstBool = _infer_const
    _infer_ConstString = _infer_ConstChar = _infer_ConstUnit = _infer_const

    def _infer_Var(self, env, e: S.Var):
        return instantiate(lookup_with_shadow(env, e.name, e.span), env)

    # -- applications ----------------------------------------------------------------

    def _infer_App(self, env, e: S.App):
        return self.check_app(env, e)

    def check_app(self, env: TyEnv, e: S.App) -> Ty:
        t_fn = self.infer(env, e.fn)
        actuals = [self.infer(env, a) for a in e.args]
        n = len(actuals)
        dec = arrow_decompose(t_fn, n)
        naming = NamingContext()
        fn_snap = snapshot(t_fn, naming)
        expected_snaps = [snapshot(p, naming) for p in dec.params]
        actual_snaps = [snapshot(a, naming) for a in actuals]
        name = _fn_name(e.fn)

        if dec.shortfall == 0:
            for i, (p, a) in enumerate(zip(dec.params, actuals)):
                conflict = unify(p, a, naming)
                if conflict is not None:
                    rows = tuple(ArgRow(j + 1, x, y, j == i) for j, (x, y)
                                 in enumerate(zip(expected_snaps, actual_snaps)))
                    _fail(e.span, AppMismatch(rows, name), conflict)
            return dec.ret

        if not dec.ret_is_var:
            _fail(e.span, TooManyArgs(len(dec.params), n, fn_snap, name))

        # The return type is a bare variable: whether more arguments fit is
        # only known once the visible parameters are unified.
        ret_snap = snapshot(dec.ret, naming)
        consumed = 0
        while True:
            for p in dec.params:
                conflict = unify(p, actuals[consumed], naming)
                if conflict is not None:
                    _fail(e.span, IllTypedApp(ret_snap, fn_snap, n, name), conflict)
                consumed += 1
            if consumed == n:
                return dec.ret
            ret = walk(dec.ret)
            if isinstance(ret, TyVar):
                chain = arrows([fresh_var(env) for _ in range(n - consumed)], fresh_var(env))
                unify(ret, chain)
            dec = arrow_decompose(ret, n - consumed)
            if not dec.params:
                _fail(e.span, TooManyArgs(consumed, n, fn_snap, name))

    # -- branching constructs ---------------------------------------------------------

    def check_role(self, env: TyEnv, e: S.Expr, role: Role) -> None:
        actual = self.infer(env, e)
        required = _ROLE_REQUIRED[role]()
        naming = NamingContext()
        actual_snap = snapshot(actual, naming)
        conflict = unify(required, actual, naming)
        if conflict is not None:
            payload = SubexprMismatch(role, snapshot(required, naming), actual_snap)
            _fail(e.span, payload, conflict, unit_context=required is t_unit())

    def _infer_If(self, env, e: S.If):
        self.check_role(env, e.cond, Role.IF_CONDITION)
        t_then = self.infer(env, e.then_branch)
        naming = NamingContext()
        if e.else_branch is None:
            then_snap = snapshot(t_then, naming)
            conflict = unify(t_then, t_unit(), naming)
            if conflict is not None:
                _fail(e.span, MissingElse(then_snap), conflict, unit_context=True)
            return t_unit()
        t_else = self.infer(env, e.else_branch)
        then_snap = snapshot(t_then, naming)
        else_snap = snapshot(t_else, naming)
        conflict = unify(t_then, t_else, naming)
        if conflict is not None:
            report = BranchReport("if", then_snap, else_snap, 2,
                                  e.else_branch.span, e.then_branch.span)
            _fail(e.then_branch.span.merge(e.else_branch.span),
                  BranchMismatch(report), conflict)
        return t_then

    def _infer_Match(self, env, e: S.Match):
        t_scrut = self.infer(env, e.scrutinee)
        arm_types = []
        for pat, body in e.arms:
            pairs: list = []
            t_pat = infer_pattern(env, pat, pairs)
            naming = NamingContext()
            pat_snap = snapshot(t_pat, naming)
            conflict = unify(t_scrut, t_pat, naming)
            if conflict is not None:
                payload = SubexprMismatch(Role.PATTERN_OF_MATCH,
                                          snapshot(t_scrut, naming), pat_snap)
                _fail(pat.span, payload, conflict)
            arm_types.append(self.infer(env.bind_many(pattern_bindings(pairs)), body))
        naming = NamingContext()
        snaps = [snapshot(t, naming) for t in arm_types]
        acc = arm_types[0]
        for i in range(1, len(arm_types)):
            acc_snap = snapshot(acc, naming) if i > 1 else snaps[0]
            conflict = unify(acc, arm_types[i], naming)
            if conflict is not None:
                report = BranchReport(
                    "match", acc_snap, snaps[i], i + 1, e.arms[i][1].span,
                    _spans_merge(body.span for _, body in e.arms[:i]))
                _fail(e.span, BranchMismatch(report), conflict)
        return acc

    def _infer_While(self, env, e: S.While):
        self.check_role(env, e.cond, Role.WHILE_CONDITION)
        self.check_role(env, e.body, Role.WHILE_BODY)
        return t_unit()

    def _infer_Seq(self, env, e: S.Seq):
        while isinstance(e, S.Seq):
            self.check_role(env, e.first, Role.SEQ_LEFT)
            e = e.second
        return self.infer(env, e)

    # -- the remaining forms follow plain HM ---------------------------------------------

    def _infer_Fun(self, env, e: S.Fun):
        pairs: list = []
        params = [infer_pattern(env, p, pairs) for p in e.params]
        body = self.infer(env.bind_many(pattern_bindings(pairs)), e.body)
        return arrows(params, body)

    def _infer_Let(self, env, e: S.Let):
        scheme = self.let_scheme(env, e.is_rec, e.name, e.bound)
        body_env = env if e.name == "_" else env.bind(e.name, scheme)
        return self.infer(body_env, e.body)

    def _infer_Tuple(self, env, e: S.Tuple):
        return TyTuple(self.infer(env, x) for x in e.elems)

    def _infer_ListLit(self, env, e: S.ListLit):
        elem = fresh_var(env)
        for x in e.elems:
            t = self.infer(env, x)
            conflict = unify(t, elem)
            if conflict is not None:
                _fail(x.span, GenericUnify(conflict), conflict)
        return t_list(elem)

    def _infer_Annot(self, env, e: S.Annot):
        t = type_of_annotation(e.ty, env, self.annot_vars)
        actual = self.infer(env, e.expr)
        conflict = unify(actual, t)
        if conflict is not None:
            _fail(e.span, GenericUnify(conflict), conflict)
        return t

    def let_scheme(self, env: TyEnv, is_rec: bool, name: str, bound: S.Expr) -> Scheme:
        inner = env.enter()
        if is_rec:
            v = fresh_var(inner)
            t = self.infer(inner.bind(name, Scheme.mono(v)), bound)
            naming = NamingContext()
            conflict = unify(v, t, naming)
            if conflict is not None:
                _fail(bound.span, GenericUnify(conflict), conflict)
            t = v
        else:
            t = self.infer(inner.with_shadow(name) if name != "_" else inner, bound)
        return generalize(env, t) if is_value(bound) else monomorphize(env, t)


def infer_easy(env: TyEnv, e: S.Expr) -> Ty:
    """Type of ``e`` under ``env``; raises :class:`TypeCheckError`."""
    ensure_recursion_limit()
    return EasyChecker().infer(env, e)


def check_program_easy(prog: list, env: Optional[TyEnv] = None) -> ProgramResult:
    ensure_recursion_limit()
    env = env if env is not None else initial_env()
    schemes = []
    for index, d in enumerate(prog, start=1):
        try:
            scheme = check_def(EasyChecker, env, d)
        except TypeCheckError as err:
            return FirstFailure(index, err.diagnostic, env)
        if d.name != "_":
            env = env.bind(d.name, scheme)
            schemes.append((d.name, scheme))
    return ProgramOk(tuple(schemes), env)
