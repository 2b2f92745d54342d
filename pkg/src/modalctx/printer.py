"""Pretty-printing in the concrete syntax accepted by :mod:`modalctx.parser`.

Precedence, loosest first: binders (``\\x:T.``, ``/\\g.``, quotation) extend as
far right as possible, then left-associative application, then the postfix
context application ``M @ (S, ...)``.  Types: ``forall g.`` loosest, then
right-associative ``->``, then the prefixes ``[S]`` and ``next``.
"""

from __future__ import annotations

from modalctx.syntax import (
    App, Arrow, Base, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Term,
    Type, Unq, Var, WVar,
)


# --------------------------------------------------------------------------
# types

def format_type(t) -> str:
    return _ty(t, 0)


def _ty(t, prec: int) -> str:
    # prec 0: anything; 1: left of an arrow; 2: under a prefix
    from modalctx.circ import Next

    match t:
        case Base(name):
            return name
        case CVar(name):
            return name
        case Forall(g, body):
            s = f"forall {g}. {_ty(body, 0)}"
            return s if prec == 0 else f"({s})"
        case Arrow(a, b):
            s = f"{_ty(a, 1)} -> {_ty(b, 0)}"
            return s if prec == 0 else f"({s})"
        case Modal(ctx, body):
            return f"[{format_tyseq(ctx)}]{_ty(body, 2)}"
        case Next(body):
            return f"next {_ty(body, 2)}"
    raise TypeError(f"not a type: {t!r}")


def format_tyseq(seq: tuple) -> str:
    return ", ".join(_ty(e, 0) for e in seq)


def format_ctx(ctx: tuple) -> str:
    return ", ".join(f"{name}:{_ty(entry, 0)}" for name, entry in ctx)


def format_stack(stack: tuple) -> str:
    if not stack:
        return "."
    return " ".join("{" + format_ctx(ctx) + "}" for ctx in stack)


# --------------------------------------------------------------------------
# terms

def format_term(m) -> str:
    from modalctx.circ import CircTerm

    if isinstance(m, CircTerm):
        return format_circ(m)
    return _tm(m, 0)


def _tm(m, prec: int) -> str:
    # prec 0: anything; 1: function position; 2: argument / postfix operand
    match m:
        case Var(x) | Const(x):
            return x
        case Lam(x, ty, body):
            s = f"\\{x}:{_ty(ty, 0)}. {_tm(body, 0)}"
            return s if prec == 0 else f"({s})"
        case CAbs(g, body):
            s = f"/\\{g}. {_tm(body, 0)}"
            return s if prec == 0 else f"({s})"
        case Quo(ctx, body):
            s = f"`{{{format_ctx(ctx)}}} {_tm(body, 0)}"
            return s if prec == 0 else f"({s})"
        case App(f, a):
            s = f"{_tm(f, 1)} {_tm(a, 2)}"
            return s if prec <= 1 else f"({s})"
        case Unq(n, code, args):
            return f"~{n}{{{_tm(code, 0)}}}({format_termseq(args)})"
        case CApp(code, seq):
            return f"{_tm(code, 2)} @ ({format_tyseq(seq)})"
    raise TypeError(f"not a term: {m!r}")


def format_termseq(seq: tuple) -> str:
    return ", ".join(e.name if isinstance(e, WVar) else _tm(e, 0) for e in seq)


def format_circ(m) -> str:
    return _circ(m, 0)


def _circ(m, prec: int) -> str:
    from modalctx.circ import CircApp, CircLam, CircQuo, CircUnq, CircVar

    match m:
        case CircVar(x):
            return x
        case CircLam(x, ty, body):
            s = f"\\{x}:{_ty(ty, 0)}. {_circ(body, 0)}"
            return s if prec == 0 else f"({s})"
        case CircApp(f, a):
            s = f"{_circ(f, 1)} {_circ(a, 2)}"
            return s if prec <= 1 else f"({s})"
        case CircQuo(body):
            return f"`{_circ(body, 2)}"
        case CircUnq(body):
            return f"~{_circ(body, 2)}"
    raise TypeError(f"not a circ term: {m!r}")


def format_any(x) -> str:
    if isinstance(x, (Type, CVar)):
        return format_type(x)
    if isinstance(x, Term):
        return format_term(x)
    if isinstance(x, WVar):
        return x.name
    if isinstance(x, tuple):
        if all(isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str) for e in x) and x:
            return format_ctx(x)
        if any(isinstance(e, (Term, WVar)) for e in x):
            return format_termseq(x)
        return format_tyseq(x)
    from modalctx.circ import CircTerm

    if isinstance(x, CircTerm):
        return format_circ(x)
    return repr(x)
