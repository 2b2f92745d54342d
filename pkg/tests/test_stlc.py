import pytest

from modalctx.parser import load_corpus, parse_stack, parse_term, parse_type
from modalctx.reduce import beta_redexes, step
from modalctx.stlc import (
    NotErasable, StackDomainsOverlap, StlcNotAFunction, StlcTypeMismatch, StlcUnboundVariable,
    erase, erase_judgment, separate_stack, stlc_alpha_equal, stlc_normalize, stlc_steps_to,
    stlc_subst, stlc_synth, uniquify_binders,
)
from modalctx.syntax import App, Base, Lam, Var, all_names, alpha_equal
from modalctx.typecheck import ModalVariant, synth

S, T, TAU = Base("s"), Base("t"), Base("tau")


def test_erase_examples():
    assert erase(parse_type("[s, t]u")) == parse_type("s -> t -> u")
    assert erase(parse_term("`{x:s} x")) == Lam("x", S, Var("x"))
    m = parse_term("~1{`{z:s} z}(y)", parse_stack("{y:s}"))
    assert erase(m) == App(Lam("z", S, Var("z")), Var("y"))


def test_erase_stack_needs_disjoint_domains():
    assert erase(parse_stack("{x:s} {y:[s]t}")) == (("x", S), ("y", parse_type("s -> t")))
    with pytest.raises(StackDomainsOverlap):
        erase(parse_stack("{x:s} {x:t}"))


def test_polymorphism_is_not_erasable():
    with pytest.raises(NotErasable):
        erase(parse_type("forall g. [g]t"))
    with pytest.raises(NotErasable):
        erase(parse_term(r"/\g. \x:t. x"))


def test_separate_stack_renames_shadowed_levels():
    stack = parse_stack("{x:s} {x:t}")
    m = parse_term("x", stack)
    st2, (m2,) = separate_stack(stack, [m])
    assert st2[0] == (("x", S),) and st2[1][0][0] != "x"
    assert m2 == Var(st2[1][0][0])


def test_uniquify_binders_makes_every_binder_distinct():
    m = parse_term(r"\x:s. `{x:s} \x:s. x")
    out = uniquify_binders(m, all_names(m))
    assert alpha_equal(out, m)
    assert out.var != "x" and out.body.ctx[0][0] != "x"


def test_stlc_synth_examples():
    assert stlc_synth((("x", TAU),), Var("x")) == TAU
    assert stlc_synth((), Lam("x", TAU, Var("x"))) == parse_type("tau -> tau")
    with pytest.raises(StlcUnboundVariable):
        stlc_synth((), Var("x"))
    with pytest.raises(StlcNotAFunction):
        stlc_synth((("x", S),), App(Var("x"), Var("x")))
    with pytest.raises(StlcTypeMismatch):
        stlc_synth((("f", parse_type("s -> t")), ("y", T)), App(Var("f"), Var("y")))


def test_stlc_subst_avoids_capture():
    out = stlc_subst(Lam("y", S, Var("x")), "x", Var("y"))
    assert out.var != "y" and out.body == Var("y")


def test_stlc_steps_to_examples():
    redex = App(Lam("x", TAU, Var("x")), Var("y"))
    assert stlc_steps_to(redex, Var("y"), 5)
    assert not stlc_steps_to(Var("y"), redex, 5)
    assert stlc_steps_to(redex, Var("y"), 5, normal_form=True)
    with pytest.raises(ValueError):
        stlc_steps_to(redex, Var("y"), 0)


def test_stlc_normal_forms_are_unique_up_to_alpha():
    a = stlc_normalize(App(Lam("x", TAU, Lam("z", TAU, Var("x"))), Var("y")))
    assert stlc_alpha_equal(a, Lam("w", TAU, Var("y")))


def test_erasure_preserves_typing_on_the_corpus():
    for d in load_corpus("box").decls:
        ty = synth(d.variant, d.stack, d.term)
        ctx, m, ety = erase_judgment(d.stack, d.term, ty)
        assert stlc_synth(ctx, m) == ety, d.name


def test_erasure_simulates_single_steps(k_terms):
    for m, _ in k_terms[::5]:
        for r in beta_redexes(m):
            assert stlc_steps_to(erase(m), erase(step(m, r)), 4)


def test_t_axiom_erases_to_application():
    stack = parse_stack("{z:s}")
    m = parse_term(r"\x:[s]t. ~0{x}(z)", stack)
    ctx, em, ety = erase_judgment(stack, m, synth(ModalVariant.T, stack, m))
    assert stlc_synth(ctx, em) == ety == parse_type("(s -> t) -> t")
