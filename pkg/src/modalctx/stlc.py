"""Erasure into the simply typed lambda calculus, plus a small independent STLC kernel.

Quotations erase to nested abstractions and unquotations to application
spines.  The STLC side has its own substitution, normalizer and
alpha-equivalence (via de Bruijn indices) so that it can serve as an oracle
for the box calculus rather than re-using its machinery.
"""

from __future__ import annotations

from collections import deque

from modalctx.subst import apply_subst
from modalctx.syntax import (
    App, Arrow, Base, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Unq,
    Var, WVar, all_names, fresh,
)


class ErasureError(Exception):
    kind = "ErasureError"


class StackDomainsOverlap(ErasureError):
    kind = "StackDomainsOverlap"


class NotErasable(ErasureError):
    kind = "NotErasable"


class StlcError(Exception):
    kind = "StlcError"


class StlcUnboundVariable(StlcError):
    kind = "UnboundVariable"


class StlcNotAFunction(StlcError):
    kind = "NotAFunction"


class StlcTypeMismatch(StlcError):
    kind = "TypeMismatch"


# --------------------------------------------------------------------------
# erasure

def erase_type(t):
    match t:
        case Base():
            return t
        case Arrow(a, b):
            return Arrow(erase_type(a), erase_type(b))
        case Modal(seq, body):
            out = erase_type(body)
            for e in reversed(seq):
                if isinstance(e, CVar):
                    raise NotErasable(f"context variable {e.name} has no simply typed image")
                out = Arrow(erase_type(e), out)
            return out
        case Forall():
            raise NotErasable("polymorphic context types have no simply typed image")
    raise TypeError(f"not a type: {t!r}")


def erase_term(m):
    match m:
        case Var():
            return m
        case Const(name, ty):
            return Const(name, erase_type(ty))
        case Lam(x, ty, body):
            return Lam(x, erase_type(ty), erase_term(body))
        case App(f, a):
            return App(erase_term(f), erase_term(a))
        case Quo(ctx, body):
            out = erase_term(body)
            for x, e in reversed(ctx):
                if isinstance(e, CVar):
                    raise NotErasable(f"weakening binding {x}:{e.name} has no simply typed image")
                out = Lam(x, erase_type(e), out)
            return out
        case Unq(_, code, args):
            out = erase_term(code)
            for a in args:
                if isinstance(a, WVar):
                    raise NotErasable(f"weakening variable {a.name} has no simply typed image")
                out = App(out, erase_term(a))
            return out
        case CAbs() | CApp():
            raise NotErasable("context abstraction has no simply typed image")
    raise TypeError(f"not a term: {m!r}")


def erase_stack(stack: tuple) -> tuple:
    """Flatten a stack into one context; defined only for pairwise disjoint domains."""
    seen: set = set()
    out = []
    for ctx in stack:
        names = {x for x, _ in ctx}
        clash = names & seen
        if clash:
            raise StackDomainsOverlap(f"name(s) {sorted(clash)} bound at two stack levels")
        seen |= names
        out.extend((x, erase_type(t)) for x, t in ctx)
    return tuple(out)


def erase(x):
    """Erase a type, a term or a context stack (a tuple of contexts)."""
    from modalctx.syntax import Term, Type

    if isinstance(x, Type):
        return erase_type(x)
    if isinstance(x, Term):
        return erase_term(x)
    if isinstance(x, tuple):
        return erase_stack(x)
    raise TypeError(f"cannot erase {x!r}")


def separate_stack(stack: tuple, terms: list) -> tuple[tuple, list]:
    """Rename stack levels apart, applying the same renaming to every term."""
    used = all_names(stack, *terms)
    seen: set = set()
    depth = len(stack)
    new_stack = []
    terms = list(terms)
    for idx, ctx in enumerate(stack):
        ren = {}
        new_ctx = []
        for x, t in ctx:
            if x in seen:
                x2 = fresh(x, used)
                used.add(x2)
                ren[x] = Var(x2)
                new_ctx.append((x2, t))
            else:
                new_ctx.append((x, t))
            seen.add(new_ctx[-1][0])
        if ren:
            terms = [apply_subst(m, ren, depth - idx) for m in terms]
        new_stack.append(tuple(new_ctx))
    return tuple(new_stack), terms


def uniquify_binders(m, used: set):
    """Rename every binder of *m* to a name used nowhere else."""
    match m:
        case Var() | Const():
            return m
        case Lam(x, ty, body):
            x2 = fresh(x, used)
            used.add(x2)
            body = apply_subst(body, {x: Var(x2)}, 1)
            return Lam(x2, ty, uniquify_binders(body, used))
        case Quo(ctx, body):
            ren = {}
            ctx2 = []
            for x, e in ctx:
                x2 = fresh(x, used)
                used.add(x2)
                ren[x] = (WVar(x2),) if isinstance(e, CVar) else Var(x2)
                ctx2.append((x2, e))
            return Quo(tuple(ctx2), uniquify_binders(apply_subst(body, ren, 1), used))
        case App(f, a):
            return App(uniquify_binders(f, used), uniquify_binders(a, used))
        case Unq(k, code, args):
            return Unq(k, uniquify_binders(code, used),
                       tuple(a if isinstance(a, WVar) else uniquify_binders(a, used) for a in args))
        case CAbs(g, body):
            return CAbs(g, uniquify_binders(body, used))
        case CApp(code, seq):
            return CApp(uniquify_binders(code, used), seq)
    raise TypeError(f"not a term: {m!r}")


def erase_judgment(stack: tuple, m, ty=None):
    """Erase ``stack |- m : ty`` after renaming levels and binders apart.

    Returns ``(context, term, type)``; *type* is None when *ty* is.
    """
    stack, (m,) = separate_stack(stack, [m])
    used = all_names(stack, m)
    m = uniquify_binders(m, used)
    return erase_stack(stack), erase_term(m), (None if ty is None else erase_type(ty))


# --------------------------------------------------------------------------
# the STLC kernel

def stlc_synth(ctx: tuple, m):
    match m:
        case Var(x):
            for name, t in reversed(ctx):
                if name == x:
                    return t
            raise StlcUnboundVariable(f"variable {x} is not bound")
        case Const(_, ty):
            return ty
        case Lam(x, ty, body):
            return Arrow(ty, stlc_synth(ctx + ((x, ty),), body))
        case App(f, a):
            ft = stlc_synth(ctx, f)
            if not isinstance(ft, Arrow):
                raise StlcNotAFunction(f"applied term has type {ft}")
            at = stlc_synth(ctx, a)
            if at != ft.dom:
                raise StlcTypeMismatch(f"argument has type {at}, expected {ft.dom}")
            return ft.cod
    raise StlcError(f"not a simply typed term: {m!r}")


def stlc_free_vars(m) -> set:
    match m:
        case Var(x):
            return {x}
        case Const():
            return set()
        case Lam(x, _, body):
            return stlc_free_vars(body) - {x}
        case App(f, a):
            return stlc_free_vars(f) | stlc_free_vars(a)
    raise StlcError(f"not a simply typed term: {m!r}")


def _stlc_names(m, out: set) -> set:
    match m:
        case Var(x):
            out.add(x)
        case Lam(x, _, body):
            out.add(x)
            _stlc_names(body, out)
        case App(f, a):
            _stlc_names(f, out)
            _stlc_names(a, out)
    return out


def stlc_subst(m, x: str, n):
    """Capture-avoiding ``m[n/x]``."""
    match m:
        case Var(y):
            return n if y == x else m
        case Const():
            return m
        case App(f, a):
            return App(stlc_subst(f, x, n), stlc_subst(a, x, n))
        case Lam(y, ty, body):
            if y == x:
                return m
            fv = stlc_free_vars(n)
            if y in fv and x in stlc_free_vars(body):
                y2 = fresh(y, fv | _stlc_names(body, set()) | {x})
                body = stlc_subst(body, y, Var(y2))
                y = y2
            return Lam(y, ty, stlc_subst(body, x, n))
    raise StlcError(f"not a simply typed term: {m!r}")


def stlc_step_all(m) -> list:
    """All one-step beta reducts of *m*."""
    out = []
    match m:
        case App(f, a):
            if isinstance(f, Lam):
                out.append(stlc_subst(f.body, f.var, a))
            out.extend(App(f2, a) for f2 in stlc_step_all(f))
            out.extend(App(f, a2) for a2 in stlc_step_all(a))
        case Lam(x, ty, body):
            out.extend(Lam(x, ty, b2) for b2 in stlc_step_all(body))
    return out


def _stlc_step_nor(m):
    match m:
        case App(Lam(x, _, body), a):
            return stlc_subst(body, x, a)
        case App(f, a):
            f2 = _stlc_step_nor(f)
            if f2 is not None:
                return App(f2, a)
            a2 = _stlc_step_nor(a)
            return None if a2 is None else App(f, a2)
        case Lam(x, ty, body):
            b2 = _stlc_step_nor(body)
            return None if b2 is None else Lam(x, ty, b2)
    return None


def stlc_normalize(m, fuel: int = 100_000):
    for _ in range(fuel):
        n = _stlc_step_nor(m)
        if n is None:
            return m
        m = n
    raise RuntimeError(f"no simply typed normal form within {fuel} steps")


def to_debruijn(m, env: tuple = ()):
    """A nameless form: bound variables become their binder distance."""
    match m:
        case Var(x):
            for idx, name in enumerate(reversed(env)):
                if name == x:
                    return ("bv", idx)
            return ("fv", x)
        case Const(name, ty):
            return ("const", name, ty)
        case Lam(x, ty, body):
            return ("lam", ty, to_debruijn(body, env + (x,)))
        case App(f, a):
            return ("app", to_debruijn(f, env), to_debruijn(a, env))
    raise StlcError(f"not a simply typed term: {m!r}")


def stlc_alpha_equal(a, b) -> bool:
    return to_debruijn(a) == to_debruijn(b)


def stlc_steps_to(m, n, bound: int, normal_form: bool = False) -> bool:
    """Whether *m* reaches *n* (up to alpha) in at most *bound* beta steps.

    With ``normal_form=True`` the question is instead whether both terms share
    a normal form, which is equivalent for typable terms.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    if normal_form:
        return stlc_alpha_equal(stlc_normalize(m), stlc_normalize(n))
    target = to_debruijn(n)
    seen = {to_debruijn(m)}
    frontier = deque([(m, 0)])
    while frontier:
        t, d = frontier.popleft()
        if to_debruijn(t) == target:
            return True
        if d == bound:
            continue
        for s in stlc_step_all(t):
            key = to_debruijn(s)
            if key not in seen:
                seen.add(key)
                frontier.append((s, d + 1))
    return False
