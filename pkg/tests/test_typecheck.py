import pytest

from modalctx.parser import parse_stack, parse_term, parse_type
from modalctx.syntax import Base, CVar, Lam, Var, WVar, alpha_equal
from modalctx.typecheck import (
    ContextMismatch, CVarEscape, IllFormedContext, LevelViolation, ModalVariant, NotAFunction, NotACode,
    NotPolymorphic, TypeMismatch, UnboundVariable, UnboundWeakeningVariable, check, synth,
    synth_seq, typechecks,
)

K, T, K4, S4 = ModalVariant.K, ModalVariant.T, ModalVariant.K4, ModalVariant.S4
S, TT = Base("s"), Base("t")
EMPTY = ((),)


def j(stack, src, cvars=()):
    st = parse_stack(stack, cvars)
    return st, parse_term(src, st, cvars)


def test_variant_policies():
    assert [n for n in range(4) if K.permits(n)] == [1]
    assert [n for n in range(4) if T.permits(n)] == [0, 1]
    assert [n for n in range(4) if K4.permits(n)] == [1, 2, 3]
    assert [n for n in range(4) if S4.permits(n)] == [0, 1, 2, 3]
    assert ModalVariant.parse("S4") is S4


def test_synth_axiom_k():
    st, m = j("{}", r"\x:[u](s -> t). \y:[u]s. `{z:u} ~1{x}(z) ~1{y}(z)")
    assert alpha_equal(synth(K, st, m), parse_type("[u](s -> t) -> [u]s -> [u]t"))


def test_synth_axiom_t_and_its_rejection_under_k():
    st, m = j("{z:s}", r"\x:[s]t. ~0{x}(z)")
    assert alpha_equal(synth(T, st, m), parse_type("[s]t -> t"))
    with pytest.raises(LevelViolation) as info:
        synth(K, st, m)
    assert info.value.rule == "Unq" and info.value.kind == "LevelViolation"


def test_synth_polymorphic_weakening():
    st, m = j("{}", r"/\g. /\d. \x:[g]t. `{j:d, i:g} ~1{x}(i)")
    assert alpha_equal(synth(K, st, m), parse_type("forall g. forall d. [g]t -> [d, g]t"))


def test_synth_seq_examples():
    assert synth_seq(K, EMPTY, ()) == ()
    st = parse_stack("{} {x:s, y:t}")
    assert synth_seq(K, st, (Var("x"), Var("y"))) == (S, TT)
    st = parse_stack("{} {i:g, x:s}", ("g",))
    assert synth_seq(K, st, (WVar("i"), Var("x"))) == (CVar("g"), S)


def test_synth_seq_unbound_weakening_variable():
    with pytest.raises(UnboundWeakeningVariable):
        synth_seq(K, EMPTY, (WVar("i"),))


def test_check_examples():
    check(S4, EMPTY, Lam("x", Base("tau"), Var("x")), parse_type("tau -> tau"))
    st, m = j("{}", r"\x:[s]t. `{z:u} `{y:s} ~2{x}(y)")
    check(K4, st, m, parse_type("[s]t -> [u][s]t"))
    with pytest.raises(LevelViolation):
        check(K, st, m, parse_type("[s]t -> [u][s]t"))
    st, m = j("{}", r"/\g. /\d. \x:[g, s, d]t. `{i:g, j:d} \y:s. ~1{x}(i, y, j)")
    check(K, st, m, parse_type("forall g. forall d. [g, s, d]t -> [g, d](s -> t)"))


def test_check_reports_both_types():
    with pytest.raises(TypeMismatch) as info:
        check(K, EMPTY, Lam("x", S, Var("x")), parse_type("t -> t"))
    assert "s -> s" in str(info.value) and "t -> t" in str(info.value)


@pytest.mark.parametrize("stack, src, cvars, error", [
    ("{}", "y", (), UnboundVariable),
    ("{x:s}", "x x", (), NotAFunction),
    ("{x:s}", "~0{x}()", (), NotACode),
    ("{x:s}", "x @ ()", (), NotPolymorphic),
    ("{x:[s]t}", "`{} ~1{x}()", (), ContextMismatch),
    ("{f:s -> t, x:t}", "f x", (), TypeMismatch),
])
def test_errors(stack, src, cvars, error):
    st = parse_stack(stack, cvars)
    variant = S4
    with pytest.raises(error) as info:
        synth(variant, st, parse_term(src, st, cvars))
    payload = info.value.to_json()
    assert payload["kind"] == error.__name__ and payload["message"]


def test_abstracting_a_context_variable_free_in_the_stack():
    st = parse_stack("{i:g}", ("g",))
    with pytest.raises(CVarEscape) as info:
        synth(K, st, parse_term(r"/\g. \x:t. x", st, ("g",)))
    assert info.value.rule == "Poly"


def test_duplicate_quotation_binders():
    st = parse_stack("{}")
    from modalctx.syntax import Quo
    with pytest.raises(IllFormedContext):
        synth(K, st, Quo((("y", S), ("y", TT)), Var("y")))


def test_only_the_rightmost_context_is_visible():
    st = parse_stack("{x:s} {}")
    with pytest.raises(UnboundVariable):
        synth(K, st, Var("x"))


def test_variant_monotonicity(k_terms):
    for m, ty in k_terms[::7]:
        for v in (T, K4, S4):
            assert alpha_equal(synth(v, EMPTY, m), ty)


def test_stack_weakening_on_the_left(k_terms):
    below = parse_stack("{q:s} {r:t}")
    for m, ty in k_terms[::11]:
        assert alpha_equal(synth(K, below + EMPTY, m), ty)


def test_synth_is_deterministic(k_terms):
    for m, ty in k_terms[:500]:
        assert synth(K, EMPTY, m) == synth(K, EMPTY, m) == ty
