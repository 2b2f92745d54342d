"""Beta reduction, normalization and one-shot eta expansion."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from modalctx.subst import apply_level_subst, apply_subst, ctx_subst, gen_sym, match_seq
from modalctx.syntax import (
    App, Arrow, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Term, Unq,
    Var, WVar, all_cvars, all_names, canonical, dom_seq, free_context_vars, fresh,
)
from modalctx.typecheck import ModalVariant, synth

BETA_APP = "BetaApp"
BETA_UNQ = "BetaUnq"
BETA_CAPP = "BetaCApp"


class FuelExhausted(Exception):
    pass


class NotExpandable(Exception):
    pass


@dataclass(frozen=True)
class Redex:
    path: tuple
    kind: str
    reduct: Term


# --------------------------------------------------------------------------
# contraction

def contract(m: Term) -> tuple[str, Term] | None:
    """Contract *m* if it is itself a redex."""
    match m:
        case App(Lam(x, _, body), arg):
            return BETA_APP, apply_subst(body, {x: arg}, 1)
        case Unq(n, Quo(ctx, body), args):
            sigma = match_seq(args, ctx)
            if sigma is None:
                return None
            if n == 0:
                ctx, body = _freshen_for_merge(ctx, body, all_names(m))
                sigma = match_seq(args, ctx)
            return BETA_UNQ, apply_subst(apply_level_subst(body, n, 1), sigma, 1)
        case CApp(CAbs(g, body), seq):
            return BETA_CAPP, ctx_subst(body, seq, g)
    return None


def _freshen_for_merge(ctx: tuple, body: Term, avoid: set) -> tuple[tuple, Term]:
    """Rename the quotation binders and the level-1 abstractions of *body*.

    Unquoting at level 0 merges the quotation context into the current one, so
    every name it introduces must be distinct from the names already around.
    """
    used = set(avoid)
    new_ctx = []
    ren = {}
    for name, entry in ctx:
        new = fresh(name, used)
        used.add(new)
        new_ctx.append((new, entry))
        ren[name] = (WVar(new),) if isinstance(entry, CVar) else Var(new)
    body = apply_subst(body, ren, 1)
    return tuple(new_ctx), _rename_level1_lams(body, 1, used)


def _rename_level1_lams(m: Term, level: int, used: set) -> Term:
    match m:
        case Var() | Const():
            return m
        case Lam(x, ty, body):
            if level == 1:
                new = fresh(x, used)
                used.add(new)
                body = apply_subst(body, {x: Var(new)}, 1)
                x = new
            return Lam(x, ty, _rename_level1_lams(body, level, used))
        case App(f, a):
            return App(_rename_level1_lams(f, level, used), _rename_level1_lams(a, level, used))
        case Quo(ctx, body):
            return Quo(ctx, _rename_level1_lams(body, level + 1, used))
        case Unq(k, code, args):
            if level > k:
                code = _rename_level1_lams(code, level - k, used)
            args = tuple(a if isinstance(a, WVar) else _rename_level1_lams(a, level, used)
                         for a in args)
            return Unq(k, code, args)
        case CAbs(g, body):
            return CAbs(g, _rename_level1_lams(body, level, used))
        case CApp(code, seq):
            return CApp(_rename_level1_lams(code, level, used), seq)
    raise TypeError(f"not a term: {m!r}")


# --------------------------------------------------------------------------
# redex positions

def _children(m: Term) -> Iterator[tuple[str, Term]]:
    match m:
        case Lam(_, _, body) | Quo(_, body) | CAbs(_, body):
            yield "body", body
        case App(f, a):
            yield "fun", f
            yield "arg", a
        case Unq(_, code, args):
            yield "code", code
            for idx, a in enumerate(args):
                if not isinstance(a, WVar):
                    yield str(idx), a
        case CApp(code, _):
            yield "code", code


def iter_redexes(m: Term, path: tuple = ()) -> Iterator[Redex]:
    """Redexes of *m* in leftmost-outermost (pre-order) order."""
    hit = contract(m)
    if hit is not None:
        yield Redex(path, hit[0], hit[1])
    for label, child in _children(m):
        yield from iter_redexes(child, path + (label,))


def beta_redexes(m: Term) -> list[Redex]:
    return list(iter_redexes(m))


def subterm_at(m: Term, path: tuple) -> Term:
    for label in path:
        m = dict(_children(m))[label]
    return m


def replace_at(m: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    match m:
        case Lam(x, ty, body) if head == "body":
            return Lam(x, ty, replace_at(body, rest, new))
        case Quo(ctx, body) if head == "body":
            return Quo(ctx, replace_at(body, rest, new))
        case CAbs(g, body) if head == "body":
            return CAbs(g, replace_at(body, rest, new))
        case App(f, a) if head == "fun":
            return App(replace_at(f, rest, new), a)
        case App(f, a) if head == "arg":
            return App(f, replace_at(a, rest, new))
        case Unq(k, code, args) if head == "code":
            return Unq(k, replace_at(code, rest, new), args)
        case Unq(k, code, args):
            idx = int(head)
            args = args[:idx] + (replace_at(args[idx], rest, new),) + args[idx + 1:]
            return Unq(k, code, args)
        case CApp(code, seq) if head == "code":
            return CApp(replace_at(code, rest, new), seq)
    raise KeyError(f"bad path component {head!r} for {m!r}")


def step(m: Term, redex: Redex) -> Term:
    return replace_at(m, redex.path, redex.reduct)


def one_step_reducts(m: Term) -> list[Term]:
    return [step(m, r) for r in iter_redexes(m)]


def normalize(m: Term, fuel: int = 100_000) -> Term:
    """Normal form by leftmost-outermost reduction, at most *fuel* steps."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    for _ in range(fuel):
        r = next(iter_redexes(m), None)
        if r is None:
            return m
        m = step(m, r)
    if next(iter_redexes(m), None) is None:
        return m
    raise FuelExhausted(f"no normal form within {fuel} steps")


def is_normal(m: Term) -> bool:
    return next(iter_redexes(m), None) is None


# --------------------------------------------------------------------------
# reduction graphs

@dataclass
class ReductionGraph:
    """Reduction graph over alpha-classes; keys are canonical representatives."""

    root: Term
    edges: dict
    terms: dict

    def normal_forms(self) -> list[Term]:
        return [self.terms[k] for k, succ in self.edges.items() if not succ]

    def is_acyclic(self) -> bool:
        indeg = {k: 0 for k in self.edges}
        for succ in self.edges.values():
            for s in succ:
                indeg[s] += 1
        queue = deque(k for k, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            k = queue.popleft()
            seen += 1
            for s in self.edges[k]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
        return seen == len(self.edges)


def reduction_graph(m: Term, max_nodes: int = 100_000) -> ReductionGraph:
    root = canonical(m)
    edges: dict = {}
    terms: dict = {root: m}
    queue = deque([root])
    while queue:
        key = queue.popleft()
        if key in edges:
            continue
        succ = set()
        for r in one_step_reducts(terms[key]):
            k = canonical(r)
            succ.add(k)
            if k not in terms:
                terms[k] = r
                if len(terms) > max_nodes:
                    raise FuelExhausted(f"reduction graph exceeds {max_nodes} nodes")
                queue.append(k)
        edges[key] = succ
    return ReductionGraph(m, edges, terms)


# --------------------------------------------------------------------------
# eta

def eta_expand(m: Term, stack: tuple, variant: ModalVariant = ModalVariant.K) -> Term:
    """One type-directed eta expansion of *m* at the head of its type."""
    ty = synth(variant, stack, m)
    avoid = all_names(m, stack)
    match ty:
        case Arrow(dom, _):
            x = fresh("x", avoid)
            return Lam(x, dom, App(m, Var(x)))
        case Modal(seq, _):
            ctx = gen_sym(avoid, seq)
            return Quo(ctx, Unq(1, m, dom_seq(ctx)))
        case Forall(_, _):
            g = fresh("g", free_context_vars(stack) | all_cvars(m, ty))
            return CAbs(g, CApp(m, (CVar(g),)))
    raise NotExpandable(f"no eta rule for type {ty}")
