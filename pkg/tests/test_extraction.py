import pytest
from hypothesis import given
from hypothesis import strategies as st

from modalctx.circ import Next, circ_synth
from modalctx.extraction import (
    EPSILON, Allocator, DuplicateBinder, GenState, PreconditionViolated, build_contr,
    build_exchg, build_weak, concat, extract_context, extract_future, extract_judgment,
    extract_past, extract_term, extract_type, gen_ca,
)
from modalctx.parser import parse_circ_term, parse_term, parse_type
from modalctx.syntax import Arrow, Base, CVar, Lam, Modal, Var, alpha_equal
from modalctx.typecheck import ModalVariant, synth

import builder_types

K = ModalVariant.K
S, T, TAU = Base("s"), Base("t"), Base("tau")
EMPTY = ((),)


def test_gen_ca_shapes():
    assert gen_ca(GenState(), 0) == (EPSILON, ())
    p, gs = gen_ca(GenState(), 1)
    assert p.support == (0,) and p[0] == (("i0", CVar("g0")),) and gs == ("g0",)
    p, gs = gen_ca(GenState(), 2)
    assert p.support == (0, 1) and p[2] == () and len(set(gs)) == 2


def test_gen_ca_names_stay_fresh():
    state = GenState()
    _, first = gen_ca(state, 2)
    _, second = gen_ca(state, 2)
    assert not set(first) & set(second)


def test_extract_type_examples():
    assert extract_type(EPSILON, TAU, GenState()) == TAU
    p = Allocator(((CVar("g"),),))
    assert extract_type(p, Next(TAU), GenState()) == Modal((CVar("g"),), TAU)
    out = extract_type(EPSILON, parse_type("(next s -> next t) -> next (s -> t)"), GenState())
    assert alpha_equal(out, parse_type("forall g. (forall d. [d]s -> [g, d]t) -> [g](s -> t)"))


def test_extract_context_examples():
    empty = extract_context((), GenState())
    assert empty.ctx == () and empty.alloc == EPSILON
    one = extract_context((("x", TAU),), GenState())
    assert one.ctx == (("x", TAU),) and one.alloc == EPSILON
    nxt = extract_context((("x", Next(TAU)),), GenState())
    (g,) = nxt.bindings[0].cvars
    assert nxt.ctx == (("x", Modal((CVar(g),), TAU)),)
    assert nxt.alloc[0] == (("i0", CVar(g)),)


def test_extract_context_rejects_duplicates():
    with pytest.raises(DuplicateBinder):
        extract_context((("x", S), ("x", T)), GenState())


def test_extract_past_examples():
    assert extract_past((), GenState()).stack == ()
    assert extract_past(((("x", TAU),),), GenState()).stack == ((("x", TAU),),)
    two = extract_past(((("x", Next(TAU)),), ()), GenState())
    assert two.stack[0] == (("x", Modal((CVar("g0"),), TAU)),)
    assert two.stack[1] == (("i0", CVar("g0")),)


def test_extract_future_examples():
    assert extract_future((), GenState()).alloc == EPSILON
    assert extract_future(((("y", TAU),),), GenState()).alloc[0] == (("y", TAU),)
    r = extract_future(((("y", Next(TAU)),),), GenState()).alloc
    assert r[0] == (("y", Modal((CVar("g0"),), TAU)),) and r[1] == (("i0", CVar("g0")),)


def test_build_weak_examples():
    assert build_weak(TAU, EPSILON, EPSILON, GenState()) == Lam("v0", TAU, Var("v0"))
    q = Allocator(((("y", TAU),),))
    m = build_weak(Next(TAU), EPSILON, q, GenState())
    assert alpha_equal(m, parse_term(r"\x:[]tau. `{y:tau} (\z:tau. z) ~1{x}()"))
    assert alpha_equal(synth(K, EMPTY, m), parse_type("[]tau -> [tau]tau"))


def test_build_weak_checks_inclusion():
    p = Allocator(((("y", TAU),),))
    with pytest.raises(PreconditionViolated):
        build_weak(Next(TAU), p, EPSILON, GenState())


def test_build_contr_duplicates_the_shared_block():
    p = Allocator(((("y", TAU),),))
    m = build_contr(Next(TAU), p, EPSILON, GenState())
    assert alpha_equal(synth(K, EMPTY, m), parse_type("[tau, tau]tau -> [tau]tau"))
    assert alpha_equal(build_contr(TAU, p, EPSILON, GenState()), Lam("x", TAU, Var("x")))


def test_build_exchg_reorders_blocks():
    a, b = Allocator(((("a", S),),)), Allocator(((("b", T),),))
    m = build_exchg(Next(TAU), a, b, EPSILON, EPSILON, GenState())
    assert alpha_equal(synth(K, EMPTY, m), builder_types.exchg_type(Next(TAU), a, b, EPSILON, EPSILON))
    m = build_exchg(Next(TAU), EPSILON, a, b, EPSILON, GenState())
    assert alpha_equal(synth(K, EMPTY, m), parse_type("[s, t]tau -> [t, s]tau"))
    assert alpha_equal(build_exchg(TAU, a, b, a, b, GenState()), Lam("x", TAU, Var("x")))


def test_build_on_arrow_types_abstracts_context_variables():
    p, q = Allocator(((("a", S),),)), Allocator(((("b", S),),))
    t = Arrow(Next(S), Next(T))
    for m, ty in [(build_weak(t, EPSILON, p, GenState()), builder_types.weak_type(t, EPSILON, p)),
                  (build_contr(t, p, EPSILON, GenState()), builder_types.contr_type(t, p, EPSILON)),
                  (build_exchg(t, p, EPSILON, EPSILON, q, GenState()),
                   builder_types.exchg_type(t, p, EPSILON, EPSILON, q))]:
        assert alpha_equal(synth(K, EMPTY, m), ty)


def test_extract_term_of_a_variable_wraps_an_identity():
    past = extract_past(((("x", TAU),),), GenState())
    future = extract_future(((),), GenState())
    _, ann = circ_synth(((("x", TAU),),), ((),), parse_circ_term("x"))
    out = extract_term(past, future, ann, GenState())
    assert alpha_equal(out, parse_term(r"(\y:tau. y) x", ((("x", TAU),),)))


def test_extract_term_requires_annotations():
    from modalctx.extraction import MalformedAnnotation
    past = extract_past(((),), GenState())
    with pytest.raises(MalformedAnnotation):
        extract_term(past, extract_future(((),), GenState()), parse_circ_term(r"\x:t. x"),
                     GenState())


def test_extract_judgment_identity():
    out = extract_judgment(EMPTY, None, parse_circ_term(r"\x:tau. x"))
    assert out.stack == EMPTY and out.ty == parse_type("tau -> tau")
    assert alpha_equal(synth(K, out.stack, out.term), out.ty)


def test_extract_judgment_distribution():
    out = extract_judgment(EMPTY, None, parse_circ_term(r"\x:(next s -> next t). `(\y:s. ~(x `y))"))
    assert alpha_equal(synth(K, out.stack, out.term), out.ty)
    assert alpha_equal(out.ty, parse_type("forall g. (forall d. [d]s -> [g, d]t) -> [g](s -> t)"))


def test_extract_judgment_with_future_contexts():
    out = extract_judgment(EMPTY, ((), (("y", T),)), parse_circ_term("``y"))
    assert alpha_equal(synth(K, out.stack, out.term), out.ty)
    assert out.to_json()["allocators"]["future"]


# --- allocator algebra -------------------------------------------------------

_contexts = st.lists(st.sampled_from([("a", S), ("b", T), ("i", CVar("g"))]), max_size=2)
allocators = st.lists(_contexts.map(tuple), max_size=3).map(lambda xs: Allocator(tuple(xs)))


@given(allocators, allocators, allocators)
def test_concat_is_associative_with_unit(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + EPSILON == p == EPSILON + p
    assert concat(p, q, r) == p + q + r


@given(allocators, allocators, st.integers(0, 4))
def test_pointwise_laws(p, q, x):
    assert (p + q)[x] == p[x] + q[x]
    assert (p + q).up() == p.up() + q.up()
    assert p.up()[x] == p[x + 1]
    assert p.push(q[0])[x + 1] == p[x] and p.push(q[0])[0] == q[0]
    assert p.rg()[x] == tuple(t for _, t in p[x])


@given(allocators, st.integers(0, 3))
def test_truncate_and_drop_split_an_allocator(p, n):
    assert p.truncate(n) + p.drop(n) == p
    assert all(p.truncate(n)[k] == () for k in range(n, 5))
