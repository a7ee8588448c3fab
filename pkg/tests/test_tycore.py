from easytype import surface as S
from easytype.rules import render_scheme
from easytype.tycore import (CONSTRUCTOR_ARITY, DArrow, DConstr, DTuple, DVar,
                             NamingContext, Scheme, TyArrow, TyEnv, TyTuple,
                             TyVar, copy_env, display_of_type_expr, fresh_var,
                             generalize, initial_env, instantiate, monomorphize,
                             render, repr_ty, snapshot, t_int, t_list, t_ref,
                             walk)
from easytype.unify import unify
import pytest


def test_fresh_var_takes_env_level():
    env = TyEnv().enter().enter()
    assert fresh_var(env).level == 2


def test_repr_compresses_path_and_walk_does_not():
    a, b, c = TyVar(0), TyVar(0), TyVar(0)
    a.link, b.link = b, c
    assert walk(a) is c and a.link is b
    assert repr_ty(a) is c and a.link is c


def test_generalize_only_inner_level_variables():
    outer = TyEnv()
    inner = outer.enter()
    x, y = fresh_var(outer), fresh_var(inner)
    s = generalize(outer, TyArrow(x, y))
    assert s.quantified == frozenset({y.id})


def test_instantiate_copies_quantified_variables_only():
    env = TyEnv().enter()
    x, y = TyVar(1), TyVar(0)
    s = Scheme(frozenset({x.id}), TyArrow(x, y))
    t1, t2 = instantiate(s, env), instantiate(s, env)
    assert t1.param is not t2.param and t1.param is not x
    assert t1.result is y and t2.result is y


def test_monomorphize_lowers_levels():
    env = TyEnv()
    v = TyVar(3)
    monomorphize(env, t_list(v))
    assert v.level == 0


def test_snapshot_names_by_first_occurrence():
    a, b = TyVar(0), TyVar(0)
    naming = NamingContext()
    d = snapshot(TyArrow(b, TyArrow(a, b)), naming)
    assert render(d) == "'a -> 'b -> 'a"
    assert render(snapshot(a, naming)) == "'b"


@pytest.mark.parametrize("text", [
    "int", "'a list", "('a -> 'b) -> 'a list -> 'b list", "int * bool -> int",
    "(int * int) list", "int ref ref", "(int -> int) ref", "'a -> ('b -> 'c) -> 'd",
    "int * (bool * float)",
])
def test_render_round_trips_through_type_parser(text):
    d = display_of_type_expr(S.parse_type(text))
    assert render(d) == text
    assert display_of_type_expr(S.parse_type(render(d))) == d


def test_initial_env_schemes_are_closed():
    env = initial_env()
    assert render_scheme(env.lookup("List.map")) == "('a -> 'b) -> 'a list -> 'b list"
    assert render_scheme(env.lookup("String.index")) == "string -> char -> int"
    assert render_scheme(env.lookup("!")) == "'a ref -> 'a"
    for name, s in env.bindings.items():
        assert "_weak" not in render_scheme(s), name


def test_copy_env_is_independent_but_preserves_sharing():
    v = TyVar(0)
    env = TyEnv({"r": Scheme.mono(t_ref(v)), "push": Scheme.mono(TyArrow(v, t_int()))})
    copy = copy_env(env)
    r, push = copy.lookup("r").body, copy.lookup("push").body
    assert walk(r.args[0]) is walk(push.param)
    assert unify(r.args[0], t_int()) is None
    assert v.link is None


def test_arity_table():
    assert CONSTRUCTOR_ARITY["list"] == 1 and CONSTRUCTOR_ARITY["int"] == 0
    with pytest.raises(ValueError):
        from easytype.tycore import TyConstr
        TyConstr("list", ())


def test_tuple_needs_two_components():
    with pytest.raises(ValueError):
        TyTuple([t_int()])
