"""Acceptance gate: one test per criterion; see the summary section of the run."""

import io
import random
import time

import pytest

from easytype import surface as S
from easytype.diagnostics import AppMismatch, BranchMismatch, GenericUnify, render_text
from easytype.driver import (EXIT_OK, IllTyped, Mode, WellTyped, check_file,
                             check_source, main, run_corpus)
from easytype.infer_classic import ProgramOk, check_program_classic
from easytype.infer_easy import check_program_easy
from easytype.rules import render_scheme
from easytype.tycore import NamingContext, render, snapshot
from easytype.unify import ConflictKind, unify
from helpers import (canonical, of_display, o_apply, oracle_unify, random_term,
                     random_type, size, to_ty)

SCENARIOS = [
    "map_float_list", "string_index_swap", "fold_left_swap", "plus_on_floats",
    "f_minus_one", "too_many_args", "fst_too_many", "fst_named", "if_branches",
    "if_residual_bias", "match_three_arms", "match_recursive", "while_condition",
    "missing_else", "missing_unit_read_int", "missing_unit_print_newline",
    "missing_bang", "missing_bang_delayed", "missing_rec",
]
SUGGESTION_PROGRAMS = {"missing_unit_read_int", "missing_unit_print_newline",
                       "missing_bang", "missing_bang_delayed", "missing_rec"}


def _outcome(corpus_dir, name, mode=Mode.BOTH):
    return check_file(corpus_dir / f"{name}.src", mode)


@pytest.mark.criterion(1, "scenario goldens match byte for byte; corpus under 5 s")
def test_criterion_1_scenario_goldens(corpus_dir):
    assert len(SCENARIOS) >= 18
    for name in SCENARIOS:
        src = (corpus_dir / f"{name}.src").read_text()
        outcome = check_source(src, f"{name}.src", Mode.EASY)
        assert isinstance(outcome.status, IllTyped), name
        golden = (corpus_dir / "expected" / f"{name}.expected").read_text()
        assert render_text(outcome.status.easy, src) == golden, name
    start = time.perf_counter()
    report = run_corpus(corpus_dir, out=io.StringIO())
    elapsed = time.perf_counter() - start
    assert report.ok, report.failed
    assert elapsed < 5.0


@pytest.mark.criterion(2, "easy reports both branch types; classic blames the later branch")
@pytest.mark.parametrize("name", ["if_branches", "match_three_arms", "match_recursive"])
def test_criterion_2_bias(corpus_dir, name):
    st = _outcome(corpus_dir, name).status
    assert isinstance(st.easy.payload, BranchMismatch)
    report = st.easy.payload.report
    assert render(report.accumulated) != render(report.offending)
    assert report.offending_index >= 2
    assert report.offending_span.contains(st.classic.span)
    assert not report.counterpart_span.contains(st.classic.span)


@pytest.mark.criterion(3, "fold_left swap: classic occurs check, easy table without occurs wording")
def test_criterion_3_fold_left(corpus_dir):
    src = (corpus_dir / "fold_left_swap.src").read_text()
    st = _outcome(corpus_dir, "fold_left_swap").status
    assert isinstance(st.classic.payload, GenericUnify)
    assert st.classic.payload.conflict.kind is ConflictKind.OCCURS_CHECK
    assert "occurs inside" in render_text(st.classic, src)
    assert isinstance(st.easy.payload, AppMismatch)
    assert "occurs" not in render_text(st.easy, src)


def _schemes(result):
    return [(n, render_scheme(s)) for n, s in result.schemes]


def _nodes(node):
    return 1 + sum(_nodes(c) for c in S.iter_children(node))


@pytest.mark.criterion(4, "classic and easy agree on acceptance and schemes")
def test_criterion_4_agreement(corpus_dir):
    ok_files = sorted(corpus_dir.glob("ok_*.src"))
    assert len(ok_files) >= 30
    for path in ok_files:
        prog = S.parse_program(path.read_text(), path.name)
        classic, easy = check_program_classic(prog), check_program_easy(prog)
        assert isinstance(classic, ProgramOk) and isinstance(easy, ProgramOk), path.name
        assert _schemes(classic) == _schemes(easy), path.name

    rng = random.Random(20240517)
    accepted = rejected = 0
    while accepted < 1000:
        src = "let t = " + random_term(rng, rng.randint(1, 12), [])
        prog = S.parse_program(src)
        if _nodes(prog[0].body) > 12:
            continue
        classic, easy = check_program_classic(prog), check_program_easy(prog)
        assert isinstance(classic, ProgramOk) == isinstance(easy, ProgramOk), src
        if isinstance(classic, ProgramOk):
            accepted += 1
            assert _schemes(classic) == _schemes(easy), src
        else:
            rejected += 1
            assert classic.index == easy.index
    assert rejected > 0


@pytest.mark.criterion(5, "destructive unify matches the substitution oracle on 10,000 pairs")
def test_criterion_5_oracle():
    rng = random.Random(5)
    successes = 0
    for _ in range(10_000):
        t1, t2 = random_type(rng, rng.randint(1, 8)), random_type(rng, rng.randint(1, 8))
        assert size(t1) <= 8 and size(t2) <= 8
        vars_ = {}
        x, y = to_ty(t1, vars_), to_ty(t2, vars_)
        conflict = unify(x, y)
        subst = oracle_unify(t1, t2)
        assert (conflict is None) == (subst is not None), (t1, t2)
        if subst is not None:
            successes += 1
            naming = NamingContext()
            got = ("*", (of_display(snapshot(x, naming)), of_display(snapshot(y, naming))))
            assert canonical(got) == canonical(o_apply(("*", (t1, t2)), subst))
    assert 1000 < successes < 9000


@pytest.mark.criterion(6, "snapshots are unchanged by later unification")
def test_criterion_6_snapshot_immutability():
    rng = random.Random(6)
    for _ in range(1000):
        vars_ = {}
        t = to_ty(random_type(rng, rng.randint(1, 8), ("a", "b", "c", "d")), vars_)
        snap = snapshot(t, NamingContext())
        before = render(snap)
        for _ in range(rng.randint(1, 6)):
            unify(to_ty(random_type(rng, 1, ("a", "b", "c", "d")), vars_),
                  to_ty(random_type(rng, 5, ("a", "b", "c", "d")), vars_))
        assert render(snap) == before


@pytest.mark.criterion(7, "well-typed corpus under --easy-type-errors: exit 0, no second pass")
def test_criterion_7_backward_compat(corpus_dir, capsys):
    ok_files = sorted(corpus_dir.glob("ok_*.src"))
    for path in ok_files:
        outcome = check_file(path, Mode.EASY)
        assert isinstance(outcome.status, WellTyped)
        assert outcome.easy_pass_runs == 0 and outcome.timing["easy"] == 0.0
        assert main([str(path), "--easy-type-errors"]) == EXIT_OK
        classic_out = check_file(path, Mode.CLASSIC).status.schemes
        assert classic_out == outcome.status.schemes
    capsys.readouterr()


def _big_definition(lines=520, error_at=260):
    out = ["let big x0 ="]
    for i in range(1, lines):
        if i == error_at:
            rhs = f"x{i - 1} +. 1.0"
        elif i % 3 == 0:
            rhs = f"if x{i - 1} > {i} then x{i - 1} - {i} else x{i - 1} + {i}"
        elif i % 3 == 1:
            rhs = f"(fun y -> y * 2) x{i - 1}"
        else:
            rhs = f"match [x{i - 1}] with [] -> 0 | h :: _ -> h"
        out.append(f"  let x{i} = {rhs} in")
    out.append(f"  x{lines - 1}")
    return "\n".join(out) + "\n"


@pytest.mark.criterion(8, "500-line definition: both passes under 1 s, easy at most 5x classic")
def test_criterion_8_performance():
    src = _big_definition()
    assert len(src.splitlines()) >= 500
    best = None
    for _ in range(3):
        start = time.perf_counter()
        outcome = check_source(src, "big.src", Mode.EASY)
        total = time.perf_counter() - start
        assert isinstance(outcome.status, IllTyped) and outcome.easy_pass_runs == 1
        if best is None or total < best[0]:
            best = (total, outcome.timing)
    total, timing = best
    assert total < 1.0
    assert timing["easy"] <= 5 * timing["classic"]


@pytest.mark.criterion(9, "suggestions fire on the missing ()/!/rec programs and nowhere else")
def test_criterion_9_suggestion_precision(corpus_dir):
    fired = set()
    for path in sorted(corpus_dir.glob("*.src")):
        outcome = check_file(path, Mode.EASY)
        if isinstance(outcome.status, IllTyped) and outcome.status.easy.suggestions:
            fired.add(path.stem)
    assert fired == SUGGESTION_PROGRAMS
