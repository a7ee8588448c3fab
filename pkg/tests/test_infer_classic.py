import pytest

from easytype import surface as S
from easytype.diagnostics import GenericUnify, TypeCheckError, UnboundVar
from easytype.infer_classic import (FirstFailure, ProgramOk,
                                    check_program_classic, infer_classic)
from easytype.rules import render_scheme
from easytype.tycore import generalize, initial_env
from easytype.unify import ConflictKind


def schemes(src):
    result = check_program_classic(S.parse_program(src))
    assert isinstance(result, ProgramOk), result
    return {n: render_scheme(s) for n, s in result.schemes}


def failure(src):
    result = check_program_classic(S.parse_program(src))
    assert isinstance(result, FirstFailure)
    return result


def text_at(src, span):
    return src.encode()[span.byte_start:span.byte_end].decode()


@pytest.mark.parametrize("src,name,ty", [
    ("let x = 1", "x", "int"),
    ("let id x = x", "id", "'a -> 'a"),
    ("let k x y = x", "k", "'a -> 'b -> 'a"),
    ("let s f g x = f x (g x)", "s", "('a -> 'b -> 'c) -> ('a -> 'b) -> 'a -> 'c"),
    ("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t", "len", "'a list -> int"),
    ("let p = (1, \"a\", 'c')", "p", "int * string * char"),
    ("let l = [[1]; []]", "l", "int list list"),
    ("let f = fun (a, b) -> b", "f", "'a * 'b -> 'b"),
    ("let r = ref []", "r", "'_weak1 list ref"),
    ("let g = let id x = x in (id 1, id true)", "g", "int * bool"),
    ("let u = while false do () done", "u", "unit"),
    ("let n = (3 : int)", "n", "int"),
])
def test_principal_types(src, name, ty):
    assert schemes(src)[name] == ty


def test_infer_expression_directly():
    t = infer_classic(initial_env().enter(), S.parse_expr("fun x -> x"))
    assert render_scheme(generalize(initial_env(), t)) == "'a -> 'a"


def test_argument_error_located_on_list_element():
    src = "let l = List.map (fun x -> x + 1) [1.0]"
    f = failure(src)
    assert isinstance(f.diagnostic.payload, GenericUnify)
    assert text_at(src, f.diagnostic.span) == "1.0"


def test_else_branch_blamed():
    src = "let b = true\nlet v = if b then 1 else 2.0"
    f = failure(src)
    assert f.index == 2
    assert text_at(src, f.diagnostic.span) == "2.0"


def test_fold_left_swap_is_occurs_check():
    f = failure("let rev l = List.fold_left (fun x acc -> x :: acc) [] l")
    assert f.diagnostic.payload.conflict.kind is ConflictKind.OCCURS_CHECK


def test_first_failure_index_and_env():
    f = failure("let a = 1\nlet b = a + 1\nlet c = b +. 1.0\nlet d = 4")
    assert f.index == 3
    assert f.env.lookup("b") is not None and f.env.lookup("c") is None


def test_unbound_variable():
    f = failure("let x = y")
    assert f.diagnostic.payload == UnboundVar("y", False)


def test_strict_sequence():
    f = failure("let s = 3; ()")
    assert f.diagnostic.payload.conflict.whole_right.name == "unit"


def test_missing_else_classic_wording():
    f = failure("let f x y = if y > x then [x; y]")
    assert f.diagnostic.payload.hint == "no_constructor:::"


def test_too_many_arguments_hint():
    f = failure("let z = (fun x -> x) 1 2")
    assert f.diagnostic.payload.hint == "too_many_args"


def test_value_restriction_blocks_generalization():
    f = failure("let r = ref []\nlet a = r := [1]; r := [true]")
    assert f.index == 2


def test_shadowed_name_is_not_recursive():
    assert schemes("let f x = x\nlet f y = f y + 1")["f"] == "int -> int"


def test_infer_classic_raises_type_check_error():
    with pytest.raises(TypeCheckError):
        infer_classic(initial_env(), S.parse_expr("1 + true"))


def test_long_program_of_many_definitions():
    src = "\n".join(f"let f{i} x = x + {i}" for i in range(500))
    assert len(schemes(src)) == 500
