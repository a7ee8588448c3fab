"""Generators and an independent reference unifier used across the tests."""

from __future__ import annotations

import random

from easytype.tycore import (DArrow, DConstr, DTuple, DVar, TyArrow, TyConstr,
                             TyTuple, TyVar)

# --- reference unifier over plain tuples -------------------------------------------
# ("v", name) | ("c", name, args) | ("->", a, b) | ("*", elems)


def o_resolve(t, subst):
    while t[0] == "v" and t[1] in subst:
        t = subst[t[1]]
    return t


def o_apply(t, subst):
    t = o_resolve(t, subst)
    if t[0] == "v":
        return t
    if t[0] == "c":
        return ("c", t[1], tuple(o_apply(a, subst) for a in t[2]))
    if t[0] == "->":
        return ("->", o_apply(t[1], subst), o_apply(t[2], subst))
    return ("*", tuple(o_apply(e, subst) for e in t[1]))


def o_occurs(name, t, subst):
    t = o_resolve(t, subst)
    if t[0] == "v":
        return t[1] == name
    if t[0] == "c":
        return any(o_occurs(name, a, subst) for a in t[2])
    if t[0] == "->":
        return o_occurs(name, t[1], subst) or o_occurs(name, t[2], subst)
    return any(o_occurs(name, e, subst) for e in t[1])


def oracle_unify(a, b, subst=None):
    """Robinson unification; returns a substitution dict or None."""
    subst = dict(subst or {})
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = o_resolve(x, subst), o_resolve(y, subst)
        if x == y:
            continue
        if x[0] == "v" or y[0] == "v":
            v, t = (x, y) if x[0] == "v" else (y, x)
            if o_occurs(v[1], t, subst):
                return None
            subst[v[1]] = t
        elif x[0] == y[0] == "c" and x[1] == y[1] and len(x[2]) == len(y[2]):
            stack.extend(zip(x[2], y[2]))
        elif x[0] == y[0] == "->":
            stack.append((x[1], y[1]))
            stack.append((x[2], y[2]))
        elif x[0] == y[0] == "*" and len(x[1]) == len(y[1]):
            stack.extend(zip(x[1], y[1]))
        else:
            return None
    return subst


def to_ty(t, vars_: dict):
    if t[0] == "v":
        if t[1] not in vars_:
            vars_[t[1]] = TyVar(1)
        return vars_[t[1]]
    if t[0] == "c":
        return TyConstr(t[1], tuple(to_ty(a, vars_) for a in t[2]))
    if t[0] == "->":
        return TyArrow(to_ty(t[1], vars_), to_ty(t[2], vars_))
    return TyTuple(to_ty(e, vars_) for e in t[1])


def of_display(d):
    if isinstance(d, DVar):
        return ("v", d.name)
    if isinstance(d, DConstr):
        return ("c", d.name, tuple(of_display(a) for a in d.args))
    if isinstance(d, DArrow):
        return ("->", of_display(d.param), of_display(d.result))
    return ("*", tuple(of_display(e) for e in d.elems))


def canonical(t, names=None):
    """Rename variables by first occurrence so alpha-equivalent terms compare equal."""
    names = {} if names is None else names
    if t[0] == "v":
        names.setdefault(t[1], f"v{len(names)}")
        return ("v", names[t[1]])
    if t[0] == "c":
        return ("c", t[1], tuple(canonical(a, names) for a in t[2]))
    if t[0] == "->":
        return ("->", canonical(t[1], names), canonical(t[2], names))
    return ("*", tuple(canonical(e, names) for e in t[1]))


def random_type(rng: random.Random, budget: int, var_pool=("a", "b", "c")):
    """A random type term with at most ``budget`` nodes."""
    if budget <= 1:
        r = rng.random()
        if r < 0.5:
            return ("v", rng.choice(var_pool))
        return ("c", rng.choice(["int", "bool", "float"]), ())
    kinds = ["leaf", "list", "ref", "->", "*"] if budget >= 3 else ["leaf", "list", "ref"]
    choice = rng.choice(kinds)
    if choice == "leaf":
        return random_type(rng, 1, var_pool)
    if choice in ("list", "ref"):
        return ("c", choice, (random_type(rng, budget - 1, var_pool),))
    left = rng.randint(1, budget - 2)
    right = budget - 1 - left
    if choice == "->":
        return ("->", random_type(rng, left, var_pool), random_type(rng, right, var_pool))
    return ("*", (random_type(rng, left, var_pool), random_type(rng, right, var_pool)))


def size(t) -> int:
    if t[0] == "v":
        return 1
    if t[0] == "c":
        return 1 + sum(size(a) for a in t[2])
    if t[0] == "->":
        return 1 + size(t[1]) + size(t[2])
    return 1 + sum(size(e) for e in t[1])


# --- random mini-ML terms ---------------------------------------------------------

_LEAVES = ["0", "1", "2.5", "true", "\"s\"", "()", "[]", "'c'"]
_FUNS = ["fst", "snd", "not", "succ", "List.length", "List.rev", "ref", "ignore",
         "float_of_int", "print_int", "List.hd", "List.map", "abs"]
_BINOPS = ["+", "+.", "=", "<", "&&", "::", "@", "^", ":="]


def random_term(rng: random.Random, budget: int, scope: list) -> str:
    """Source text for a random term of roughly ``budget`` AST nodes."""
    if budget <= 1:
        pool = _LEAVES + scope * 3 + _FUNS
        return rng.choice(pool)
    k = rng.randrange(9)
    if k == 0:
        x = f"x{len(scope)}"
        return f"(fun {x} -> {random_term(rng, budget - 1, scope + [x])})"
    if k == 1:
        x = f"x{len(scope)}"
        a = rng.randint(1, budget - 1)
        bound = random_term(rng, a, scope)
        body = random_term(rng, max(1, budget - 1 - a), scope + [x])
        return f"(let {x} = {bound} in {body})"
    if k == 2 and budget >= 4:
        a = rng.randint(1, budget - 3)
        b = rng.randint(1, budget - 2 - a)
        c = max(1, budget - 1 - a - b)
        return (f"(if {random_term(rng, a, scope)} then {random_term(rng, b, scope)}"
                f" else {random_term(rng, c, scope)})")
    if k == 3 and budget >= 3:
        a = rng.randint(1, budget - 2)
        return f"({random_term(rng, a, scope)}, {random_term(rng, max(1, budget - 1 - a), scope)})"
    if k == 4 and budget >= 3:
        a = rng.randint(1, budget - 2)
        op = rng.choice(_BINOPS)
        return f"({random_term(rng, a, scope)} {op} {random_term(rng, max(1, budget - 1 - a), scope)})"
    if k == 5 and budget >= 4:
        h, t = f"x{len(scope)}", f"x{len(scope) + 1}"
        a = rng.randint(1, budget - 3)
        b = rng.randint(1, budget - 2 - a)
        c = max(1, budget - 1 - a - b)
        return (f"(match {random_term(rng, a, scope)} with [] -> {random_term(rng, b, scope)}"
                f" | {h} :: {t} -> {random_term(rng, c, scope + [h, t])})")
    if k == 6 and budget >= 3:
        a = rng.randint(1, budget - 2)
        return f"[{random_term(rng, a, scope)}; {random_term(rng, max(1, budget - 1 - a), scope)}]"
    # application
    a = rng.randint(1, budget - 1)
    fn = rng.choice(scope + _FUNS) if rng.random() < 0.6 else random_term(rng, a, scope)
    return f"({fn} {random_term(rng, max(1, budget - 1 - a), scope)})"
