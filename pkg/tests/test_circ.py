import pytest

from modalctx.circ import (
    CircApp, CircLam, CircQuo, CircUnq, CircVar, EmptyFuture, EmptyPast, Next, NotAFunction,
    TypeMismatch, UnboundVariable, circ_synth, ctx_depth, future_need, is_annotated,
    is_circ_type, strip_annotations,
)
from modalctx.parser import load_corpus, parse_circ_term, parse_type
from modalctx.syntax import Arrow, Base, Modal

S, T, TAU = Base("s"), Base("t"), Base("tau")


def test_variable():
    ty, ann = circ_synth(((), (("x", TAU),)), ((),), CircVar("x"))
    assert ty == TAU and ann.ty == TAU


def test_modal_axiom_k():
    m = parse_circ_term(r"\x:next (s -> t). \y:next s. `(~x ~y)")
    ty, ann = circ_synth(((),), None, m)
    assert ty == parse_type("next (s -> t) -> next s -> next t")
    assert is_annotated(ann)


def test_distribution_over_arrows():
    m = parse_circ_term(r"\x:(next s -> next t). `(\y:s. ~(x `y))")
    ty, _ = circ_synth(((),), None, m)
    assert ty == Arrow(Arrow(Next(S), Next(T)), Next(Arrow(S, T)))


def test_ctx_depth_follows_codomains():
    assert ctx_depth(TAU) == 0
    assert ctx_depth(Next(Next(TAU))) == 2
    assert ctx_depth(Arrow(Next(TAU), TAU)) == 0
    assert ctx_depth(Arrow(TAU, Next(TAU))) == 1


def test_future_need_counts_quotation_depth():
    assert future_need(parse_circ_term("``y")) == 2
    assert future_need(parse_circ_term(r"\x:t. x")) == 0


def test_is_circ_type():
    assert is_circ_type(Next(Arrow(S, T)))
    assert not is_circ_type(Modal((S,), T))


@pytest.mark.parametrize("past, future, src, error", [
    (((),), None, "y", UnboundVariable),
    (((),), None, "~y", EmptyPast),
    (((),), ((),), "`(`x)", EmptyFuture),
    ((((("x", S),)),), None, "x x", NotAFunction),
    ((((("f", Arrow(S, T)), ("x", T)),)), None, "f x", TypeMismatch),
])
def test_errors(past, future, src, error):
    with pytest.raises(error) as info:
        circ_synth(past, future, parse_circ_term(src))
    assert info.value.to_json()["kind"] == error.__name__


def test_unquote_of_a_non_next_type_is_rejected():
    with pytest.raises(TypeMismatch):
        circ_synth(((("c", S),), ()), None, CircUnq(CircVar("c")))


def test_corpus_synthesizes_declared_types():
    decls = load_corpus("circ").decls
    assert len(decls) >= 10
    for d in decls:
        ty, _ = circ_synth(d.stack, d.future, d.term)
        assert ty == d.ty, d.name


def test_strip_and_resynthesize_round_trip():
    for d in load_corpus("circ").decls:
        _, ann = circ_synth(d.stack, d.future, d.term)
        bare = strip_annotations(ann)
        assert not is_annotated(bare) or bare == ann
        _, again = circ_synth(d.stack, d.future, bare)
        assert again == ann


def test_constructors_compare_structurally():
    a = CircApp(CircLam("x", S, CircVar("x")), CircQuo(CircVar("y")))
    b = CircApp(CircLam("x", S, CircVar("x")), CircQuo(CircVar("y")))
    assert a == b
