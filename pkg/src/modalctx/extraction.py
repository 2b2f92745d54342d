"""Context extraction: translating the temporal calculus into K with polymorphic contexts.

Every implicit per-stage context of a temporal term is made explicit with a
context allocator, a finitely supported map from stage offsets to contexts.
Stage 0 of an allocator attached to a context means "the stage right after
it".  Fresh context and weakening variables come from a single
:class:`GenState` per translation run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from modalctx.circ import (
    CircApp, CircJudgment, CircLam, CircQuo, CircTerm, CircUnq, CircVar, Next,
    circ_synth, ctx_depth,
)
from modalctx.syntax import (
    App, Arrow, Base, CAbs, CApp, CVar, Forall, Lam, Modal, Quo, Unq, Var,
    dom_seq, fresh, rg,
)


class ExtractionError(Exception):
    kind = "ExtractionError"

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": str(self)}


class DuplicateBinder(ExtractionError):
    kind = "DuplicateBinder"


class PreconditionViolated(ExtractionError):
    kind = "PreconditionViolated"


class MalformedAnnotation(ExtractionError):
    kind = "MalformedAnnotation"


class GenerativeMismatch(ExtractionError):
    kind = "GenerativeMismatch"


# --------------------------------------------------------------------------
# allocators

@dataclass(frozen=True)
class Allocator:
    """A finitely supported map from stage offsets to contexts or type sequences.

    Stages beyond ``stages`` are empty; trailing empty stages are trimmed so
    that equal maps compare equal.
    """

    stages: tuple = ()

    def __post_init__(self):
        stages = tuple(tuple(s) for s in self.stages)
        while stages and not stages[-1]:
            stages = stages[:-1]
        object.__setattr__(self, "stages", stages)

    def __getitem__(self, k: int) -> tuple:
        return self.stages[k] if 0 <= k < len(self.stages) else ()

    def __add__(self, other: "Allocator") -> "Allocator":
        n = max(len(self.stages), len(other.stages))
        return Allocator(tuple(self[k] + other[k] for k in range(n)))

    def up(self) -> "Allocator":
        return Allocator(self.stages[1:])

    def push(self, ctx: tuple) -> "Allocator":
        return Allocator((tuple(ctx),) + self.stages)

    def rg(self) -> "Allocator":
        return Allocator(tuple(rg(s) for s in self.stages))

    def truncate(self, n: int) -> "Allocator":
        """Keep stages below *n*, clear the rest."""
        return Allocator(self.stages[:n])

    def drop(self, n: int) -> "Allocator":
        """Clear stages below *n*, keep the rest in place."""
        return Allocator(((),) * min(n, len(self.stages)) + self.stages[n:])

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.stages) if s)

    def __len__(self) -> int:
        return len(self.stages)


EPSILON = Allocator()


def concat(*allocs: Allocator) -> Allocator:
    out = EPSILON
    for a in allocs:
        out = out + a
    return out


@dataclass
class GenState:
    """Deterministic fresh-name supply for one translation run."""

    used: set = field(default_factory=set)

    def fresh(self, base: str) -> str:
        name = fresh(base, self.used)
        self.used.add(name)
        return name

    def reserve(self, names) -> None:
        self.used.update(names)


def gen_ca(st: GenState, n: int) -> tuple[Allocator, tuple[str, ...]]:
    """An allocator with one fresh weakening binding ``i:g`` at each stage below *n*."""
    stages = []
    cvars = []
    for _ in range(n):
        g = st.fresh("g")
        i = st.fresh("i")
        stages.append(((i, CVar(g)),))
        cvars.append(g)
    return Allocator(tuple(stages)), tuple(cvars)


# --------------------------------------------------------------------------
# types

def foralls(cvars, body):
    for g in reversed(cvars):
        body = Forall(g, body)
    return body


def cabs(cvars, body):
    for g in reversed(cvars):
        body = CAbs(g, body)
    return body


def capp_each(m, cvars):
    for g in cvars:
        m = CApp(m, (CVar(g),))
    return m


def extract_type(pbar: Allocator, t, st: GenState):
    """Translate a temporal type under a type-sequence allocator."""
    match t:
        case Base():
            return t
        case Next(body):
            return Modal(pbar[0], extract_type(pbar.up(), body, st))
        case Arrow(s, u):
            q, gs = gen_ca(st, ctx_depth(s))
            rq = q.rg()
            return foralls(gs, Arrow(extract_type(rq, s, st), extract_type(pbar + rq, u, st)))
    raise TypeError(f"not a circ type: {t!r}")


def generative_type(t, st: GenState):
    """``(T, R, gammas)`` with ``(R, gammas) = GenCa(D(t))`` and ``T`` the type under ``rg R``."""
    r, gs = gen_ca(st, ctx_depth(t))
    return extract_type(r.rg(), t, st), r, gs


# --------------------------------------------------------------------------
# contexts and stacks

@dataclass(frozen=True)
class BindingRecord:
    name: str
    source: object
    ty: object
    alloc: Allocator
    cvars: tuple


@dataclass(frozen=True)
class CtxTranslation:
    """A translated context together with what was generated for it."""

    source: tuple = ()
    ctx: tuple = ()
    alloc: Allocator = EPSILON
    bindings: tuple = ()

    def extend(self, rec: BindingRecord) -> "CtxTranslation":
        if any(b.name == rec.name for b in self.bindings):
            raise DuplicateBinder(f"{rec.name} is already bound in this context")
        return CtxTranslation(self.source + ((rec.name, rec.source),),
                              self.ctx + ((rec.name, rec.ty),),
                              self.alloc + rec.alloc,
                              self.bindings + (rec,))

    def lookup(self, name: str) -> BindingRecord | None:
        for b in reversed(self.bindings):
            if b.name == name:
                return b
        return None


def extract_context(ctx: tuple, st: GenState) -> CtxTranslation:
    out = CtxTranslation()
    for name, t in ctx:
        ty, r, gs = generative_type(t, st)
        out = out.extend(BindingRecord(name, t, ty, r, gs))
    return out


@dataclass(frozen=True)
class PastTranslation:
    levels: tuple = ()

    @property
    def alloc(self) -> Allocator:
        return self._fold()[1]

    @property
    def stack(self) -> tuple:
        return self._fold()[0]

    def _fold(self):
        stack = []
        p = EPSILON
        for lv in self.levels:
            stack.append(p[0] + lv.ctx)
            p = p.up() + lv.alloc
        return tuple(stack), p

    def below(self) -> "PastTranslation":
        return PastTranslation(self.levels[:-1])

    def with_current(self, lv: CtxTranslation) -> "PastTranslation":
        return PastTranslation(self.levels[:-1] + (lv,))

    def push(self, lv: CtxTranslation) -> "PastTranslation":
        return PastTranslation(self.levels + (lv,))


@dataclass(frozen=True)
class FutureTranslation:
    levels: tuple = ()

    @property
    def alloc(self) -> Allocator:
        q = EPSILON
        for lv in reversed(self.levels):
            q = (lv.alloc + q).push(lv.ctx)
        return q


def extract_past(past: tuple, st: GenState) -> PastTranslation:
    return PastTranslation(tuple(extract_context(ctx, st) for ctx in past))


def extract_future(future: tuple, st: GenState) -> FutureTranslation:
    return FutureTranslation(tuple(extract_context(ctx, st) for ctx in future))


# --------------------------------------------------------------------------
# structural terms

def _identity(t, st):
    v = st.fresh("v")
    return Lam(v, t, Var(v))


def _is_sub(small: tuple, big: tuple) -> bool:
    return all(b in big for b in small)


def build_weak(t, p: Allocator, q: Allocator, st: GenState):
    """A term of type ``[[t]]_rg(p) -> [[t]]_rg(q)`` when ``p`` is pointwise included in ``q``."""
    for k in range(max(len(p), len(q))):
        if not _is_sub(p[k], q[k]):
            raise PreconditionViolated(f"stage {k} of the source allocator is not included "
                                       "in the target allocator")
    return _weak(t, p, q, st)


def _weak(t, p, q, st):
    match t:
        case Base():
            return _identity(t, st)
        case Arrow(s, u):
            r, gs = gen_ca(st, ctx_depth(s))
            s_ty = extract_type(r.rg(), s, st)
            x, y = st.fresh("v"), st.fresh("v")
            x_ty = foralls(gs, Arrow(s_ty, extract_type((p + r).rg(), u, st)))
            inner = _weak(u, p + r, q + r, st)
            return Lam(x, x_ty, cabs(gs, Lam(y, s_ty, App(inner, App(capp_each(Var(x), gs), Var(y))))))
        case Next(u):
            x = st.fresh("v")
            x_ty = Modal(rg(p[0]), extract_type(p.up().rg(), u, st))
            inner = _weak(u, p.up(), q.up(), st)
            return Lam(x, x_ty, Quo(q[0], App(inner, Unq(1, Var(x), dom_seq(p[0])))))
    raise TypeError(f"not a circ type: {t!r}")


def build_contr(t, p: Allocator, q: Allocator, st: GenState):
    """A term of type ``[[t]]_rg(p+p+q) -> [[t]]_rg(p+q)``."""
    match t:
        case Base():
            return _identity(t, st)
        case Arrow(s, u):
            r, gs = gen_ca(st, ctx_depth(s))
            s_ty = extract_type(r.rg(), s, st)
            x, y = st.fresh("v"), st.fresh("v")
            x_ty = foralls(gs, Arrow(s_ty, extract_type(concat(p, p, q, r).rg(), u, st)))
            inner = build_contr(u, p, q + r, st)
            return Lam(x, x_ty, cabs(gs, Lam(y, s_ty, App(inner, App(capp_each(Var(x), gs), Var(y))))))
        case Next(u):
            x = st.fresh("v")
            src = p[0] + p[0] + q[0]
            x_ty = Modal(rg(src), extract_type(concat(p.up(), p.up(), q.up()).rg(), u, st))
            inner = build_contr(u, p.up(), q.up(), st)
            return Lam(x, x_ty, Quo(p[0] + q[0], App(inner, Unq(1, Var(x), dom_seq(src)))))
    raise TypeError(f"not a circ type: {t!r}")


def build_exchg(t, p: Allocator, q: Allocator, p2: Allocator, q2: Allocator, st: GenState):
    """A term of type ``[[t]]_rg(p+q+p2+q2) -> [[t]]_rg(p+p2+q+q2)``."""
    match t:
        case Base():
            return _identity(t, st)
        case Arrow(s, u):
            r, gs = gen_ca(st, ctx_depth(s))
            s_ty = extract_type(r.rg(), s, st)
            x, y = st.fresh("v"), st.fresh("v")
            x_ty = foralls(gs, Arrow(s_ty, extract_type(concat(p, q, p2, q2, r).rg(), u, st)))
            inner = build_exchg(u, p, q, p2, q2 + r, st)
            return Lam(x, x_ty, cabs(gs, Lam(y, s_ty, App(inner, App(capp_each(Var(x), gs), Var(y))))))
        case Next(u):
            x = st.fresh("v")
            src = p[0] + q[0] + p2[0] + q2[0]
            x_ty = Modal(rg(src), extract_type(concat(p.up(), q.up(), p2.up(), q2.up()).rg(), u, st))
            inner = build_exchg(u, p.up(), q.up(), p2.up(), q2.up(), st)
            return Lam(x, x_ty, Quo(p[0] + p2[0] + q[0] + q2[0],
                                    App(inner, Unq(1, Var(x), dom_seq(src)))))
    raise TypeError(f"not a circ type: {t!r}")


# --------------------------------------------------------------------------
# terms and judgments

def extract_term(past: PastTranslation, future: FutureTranslation, m: CircTerm, st: GenState):
    """Translate an annotated temporal term under the given generative records."""
    if m.ty is None:
        raise MalformedAnnotation(f"node {m} carries no type annotation")
    match m:
        case CircVar(x):
            if not past.levels:
                raise GenerativeMismatch(f"variable {x} with an empty past")
            rec = past.levels[-1].lookup(x)
            if rec is None:
                raise GenerativeMismatch(f"variable {x} has no generative record")
            return App(build_weak(m.ty, rec.alloc, past.alloc + future.alloc, st), Var(x))
        case CircLam(x, s, body):
            if not past.levels:
                raise GenerativeMismatch("abstraction with an empty past")
            if not isinstance(m.ty, Arrow) or body.ty is None:
                raise MalformedAnnotation(f"abstraction annotated with {m.ty}")
            s_ty, r, gs = generative_type(s, st)
            p = past.alloc
            inner_past = past.with_current(past.levels[-1].extend(BindingRecord(x, s, s_ty, r, gs)))
            body_tr = extract_term(inner_past, future, body, st)
            ex = build_exchg(body.ty, p, r, future.alloc, EPSILON, st)
            return cabs(gs, Lam(x, s_ty, App(ex, body_tr)))
        case CircApp(f, a):
            if not isinstance(f.ty, Arrow):
                raise MalformedAnnotation(f"function annotated with {f.ty}")
            d = ctx_depth(f.ty.dom)
            pq = past.alloc + future.alloc
            fun = extract_term(past, future, f, st)
            for k in range(d):
                fun = CApp(fun, rg(pq[k]))
            arg = extract_term(past, future, a, st)
            return App(build_contr(m.ty, pq.truncate(d), pq.drop(d), st), App(fun, arg))
        case CircQuo(body):
            if not future.levels:
                raise GenerativeMismatch("quotation with no future context")
            head = future.levels[0]
            ctx = past.alloc[0] + head.ctx
            body_tr = extract_term(past.push(head), FutureTranslation(future.levels[1:]), body, st)
            return Quo(ctx, body_tr)
        case CircUnq(body):
            if not past.levels:
                raise GenerativeMismatch("unquotation with an empty past")
            below = past.below()
            current = past.levels[-1]
            ctx = below.alloc[0] + current.ctx
            code = extract_term(below, FutureTranslation((current,) + future.levels), body, st)
            return Unq(1, code, dom_seq(ctx))
    raise TypeError(f"not a circ term: {m!r}")


@dataclass(frozen=True)
class ExtractionReport:
    source: CircJudgment
    past: PastTranslation
    future: FutureTranslation
    stack: tuple
    term: object
    ty: object

    def to_json(self) -> dict:
        from modalctx.printer import format_ctx, format_stack, format_type, format_term

        def alloc(a: Allocator) -> list:
            return [format_ctx(s) for s in a.stages]

        return {
            "source": {
                "past": format_stack(self.source.past),
                "future": format_stack(self.source.future),
                "term": format_term(self.source.term),
                "type": format_type(self.source.ty),
            },
            "allocators": {"past": alloc(self.past.alloc), "future": alloc(self.future.alloc)},
            "output": {
                "stack": format_stack(self.stack),
                "term": format_term(self.term),
                "type": format_type(self.ty),
            },
        }


def _circ_names(m: CircTerm, out: set) -> None:
    match m:
        case CircVar(x):
            out.add(x)
        case CircLam(x, _, body):
            out.add(x)
            _circ_names(body, out)
        case CircApp(f, a):
            _circ_names(f, out)
            _circ_names(a, out)
        case CircQuo(body) | CircUnq(body):
            _circ_names(body, out)


def extract_judgment(past: tuple, future: tuple | None, m: CircTerm,
                     st: GenState | None = None) -> ExtractionReport:
    """Type *m*, then translate the whole judgment ``past | future |- m``."""
    ty, annotated = circ_synth(past, future, m)
    if future is None:
        from modalctx.circ import future_need

        future = ((),) * future_need(m)
    st = st or GenState()
    names: set = set()
    _circ_names(m, names)
    for ctx in tuple(past) + tuple(future):
        names.update(x for x, _ in ctx)
    st.reserve(names)
    ptr = extract_past(tuple(past), st)
    ftr = extract_future(tuple(future), st)
    term = extract_term(ptr, ftr, annotated, st)
    out_ty = extract_type((ptr.alloc + ftr.alloc).rg(), ty, st)
    return ExtractionReport(CircJudgment(tuple(past), tuple(future), annotated, ty),
                            ptr, ftr, ptr.stack, term, out_ty)
