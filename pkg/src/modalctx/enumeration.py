"""Exhaustive, type-directed enumeration of small well-typed terms.

Terms are built bottom-up together with their types, so every term produced is
well typed by construction (the property suites still re-check it with the
real typechecker).  Binder names are derived from the number of bindings in
scope, which keeps the output deterministic and free of accidental shadowing.
"""

from __future__ import annotations

from functools import lru_cache

from modalctx.syntax import App, Arrow, Base, CAbs, CVar, Lam, Modal, Quo, Unq, Var, WVar

B = Base("b")

DEFAULT_ANNOTATIONS = (B, Modal((B,), B))
DEFAULT_QUOTE_CONTEXTS = ((B,),)
# Two pool choices whose union stays around 10^4 closed terms at size 8 while
# still covering empty quotation contexts, modal-typed binders and both redex kinds.
K_POOLS = (
    ((B,), ((), (B,))),
    ((B, Modal((B,), B)), ((B,),)),
)


def _bindings(stack: tuple) -> int:
    return sum(len(ctx) for ctx in stack)


class Enumerator:
    """Enumerates terms by exact size under a given stack.

    *annotations* are the candidate lambda annotation types, *quote_contexts*
    the candidate ranges of quotation contexts (context variables allowed) and
    *levels* the unquote levels to try.
    """

    def __init__(self, annotations=DEFAULT_ANNOTATIONS, quote_contexts=DEFAULT_QUOTE_CONTEXTS,
                 levels=(1,)):
        self.annotations = tuple(annotations)
        self.quote_contexts = tuple(tuple(q) for q in quote_contexts)
        self.levels = tuple(levels)
        self.terms = lru_cache(maxsize=None)(self._terms)
        self.seqs = lru_cache(maxsize=None)(self._seqs)

    def _terms(self, stack: tuple, size: int) -> dict:
        """Map from type to the tuple of terms of exactly *size* under *stack*."""
        out: dict = {}

        def add(ty, m):
            out.setdefault(ty, []).append(m)

        if size < 1:
            return {}
        if size == 1 and stack:
            seen = set()
            for x, e in reversed(stack[-1]):
                if x not in seen and not isinstance(e, CVar):
                    add(e, Var(x))
                seen.add(x)
        if size >= 2 and stack:
            x = f"x{_bindings(stack)}"
            for a in self.annotations:
                inner = stack[:-1] + (stack[-1] + ((x, a),),)
                for bt, ms in self.terms(inner, size - 1).items():
                    for m in ms:
                        add(Arrow(a, bt), Lam(x, a, m))
        if size >= 3 and stack:
            for i in range(1, size - 1):
                args = self.terms(stack, size - 1 - i)
                for ft, fs in self.terms(stack, i).items():
                    if isinstance(ft, Arrow) and ft.dom in args:
                        for f in fs:
                            for a in args[ft.dom]:
                                add(ft.cod, App(f, a))
        if size >= 2:
            base = _bindings(stack)
            for seq in self.quote_contexts:
                ctx = tuple((f"i{base + k}" if isinstance(e, CVar) else f"y{base + k}", e)
                            for k, e in enumerate(seq))
                for bt, ms in self.terms(stack + (ctx,), size - 1).items():
                    for m in ms:
                        add(Modal(seq, bt), Quo(ctx, m))
        if size >= 2:
            for n in self.levels:
                if len(stack) < n:
                    continue
                outer = stack[: len(stack) - n]
                for i in range(1, size):
                    for ct, cs in self.terms(outer, i).items():
                        if not isinstance(ct, Modal):
                            continue
                        for args in self.seqs(stack, ct.ctx, size - 1 - i):
                            for c in cs:
                                add(ct.body, Unq(n, c, args))
        return {ty: tuple(ms) for ty, ms in out.items()}

    def _seqs(self, stack: tuple, tys: tuple, size: int) -> tuple:
        """Argument sequences for *tys* whose sizes sum to exactly *size*."""
        if not tys:
            return ((),) if size == 0 else ()
        head, rest = tys[0], tys[1:]
        out = []
        if isinstance(head, CVar):
            if stack:
                seen = set()
                for x, e in reversed(stack[-1]):
                    if x not in seen and e == head:
                        out.extend((WVar(x),) + tail for tail in self.seqs(stack, rest, size - 1))
                    seen.add(x)
            return tuple(out)
        for i in range(1, size - len(rest) + 1):
            heads = self.terms(stack, i).get(head, ())
            if not heads:
                continue
            for tail in self.seqs(stack, rest, size - i):
                out.extend((h,) + tail for h in heads)
        return tuple(out)

    def upto(self, stack: tuple, max_size: int):
        """All ``(term, type)`` pairs of size at most *max_size*, smallest first."""
        for size in range(1, max_size + 1):
            for ty, ms in self.terms(stack, size).items():
                for m in ms:
                    yield m, ty


def closed_k_terms(max_size: int = 8) -> list:
    """Closed well-typed K terms over the single base type ``b``, without duplicates."""
    seen = set()
    out = []
    for annotations, quotes in K_POOLS:
        for m, ty in Enumerator(annotations, quotes).upto(((),), max_size):
            if m not in seen:
                seen.add(m)
                out.append((m, ty))
    return out


POLY_CVAR = "g"
_G = CVar(POLY_CVAR)
POLY_ANNOTATIONS = (B, Modal((_G,), B), Modal((_G, B), B))
POLY_QUOTE_CONTEXTS = ((), (_G,), (_G, B))


def poly_bodies(max_size: int = 6, stack: tuple = ((),)) -> list:
    """Terms mentioning the context variable ``g``, under *stack*."""
    en = Enumerator(POLY_ANNOTATIONS, POLY_QUOTE_CONTEXTS)
    return list(en.upto(stack, max_size))


def closed_poly_terms(max_size: int = 6) -> list:
    """Closed terms ``/\\g. M`` with their polymorphic types."""
    from modalctx.syntax import Forall, free_context_vars

    out = []
    for m, ty in poly_bodies(max_size - 1):
        if POLY_CVAR in free_context_vars(m) or POLY_CVAR in free_context_vars(ty):
            out.append((CAbs(POLY_CVAR, m), Forall(POLY_CVAR, ty)))
    return out
