"""Abstract syntax shared by the box calculus and its polymorphic-context extension.

Names are plain strings.  Term variables and weakening variables share one
namespace (both are bound by contexts); context variables live in their own.
Everything is immutable, so terms can be hashed and shared freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union


class Type:
    __slots__ = ()

    def __str__(self) -> str:
        from modalctx.printer import format_type

        return format_type(self)


@dataclass(frozen=True, slots=True)
class Base(Type):
    name: str


@dataclass(frozen=True, slots=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True, slots=True)
class Modal(Type):
    """Contextual modal type ``[S1, ..., Sn]T``."""

    ctx: tuple  # TypeSeq
    body: Type


@dataclass(frozen=True, slots=True)
class Forall(Type):
    cvar: str
    body: Type


@dataclass(frozen=True, slots=True)
class CVar:
    """A context variable standing in a type sequence."""

    name: str

    def __str__(self) -> str:
        return self.name


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from modalctx.printer import format_term

        return format_term(self)


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Const(Term):
    """A closed primitive constant (``if``, ``true``...) usable at every level."""

    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class Lam(Term):
    var: str
    annot: Type
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Quo(Term):
    ctx: tuple  # Context
    body: Term


@dataclass(frozen=True, slots=True)
class Unq(Term):
    level: int
    code: Term
    args: tuple  # TermSeq


@dataclass(frozen=True, slots=True)
class CAbs(Term):
    cvar: str
    body: Term


@dataclass(frozen=True, slots=True)
class CApp(Term):
    code: Term
    tyseq: tuple  # TypeSeq


@dataclass(frozen=True, slots=True)
class WVar:
    """A weakening variable standing in a term sequence."""

    name: str

    def __str__(self) -> str:
        return self.name


TyEntry = Union[Type, CVar]
TmEntry = Union[Term, WVar]
# A context is a tuple of (name, entry) pairs; entry is a Type for an ordinary
# binding x:T and a CVar for a weakening binding i:g.
Binding = tuple
Context = tuple
Stack = tuple


# --------------------------------------------------------------------------
# fresh names

_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh(base: str, avoid: Iterable[str]) -> str:
    """Return ``stem + k`` for the smallest k >= 0 not in *avoid*.

    The stem is *base* with any numeric suffix stripped, so freshening ``x3``
    may give ``x0``.
    """
    avoid = avoid if isinstance(avoid, (set, frozenset, dict)) else set(avoid)
    stem = _TRAILING_DIGITS.sub("", base) or base
    k = 0
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


# --------------------------------------------------------------------------
# contexts

def dom(ctx: Context) -> list[str]:
    return [name for name, _ in ctx]


def rg(ctx: Context) -> tuple:
    return tuple(entry for _, entry in ctx)


def context_project(ctx: Context) -> tuple[list[str], tuple]:
    return dom(ctx), rg(ctx)


def dom_seq(ctx: Context) -> tuple:
    """The domain of a context as a term sequence (weakening binders become WVar)."""
    return tuple(WVar(n) if isinstance(e, CVar) else Var(n) for n, e in ctx)


def is_distinct(ctx: Context) -> bool:
    names = dom(ctx)
    return len(names) == len(set(names))


def lookup(ctx: Context, name: str):
    for n, entry in reversed(ctx):
        if n == name:
            return entry
    return None


# --------------------------------------------------------------------------
# free variables

def free_vars(m: Term, level: int = 1) -> set[str]:
    """Level-``level`` free variables of *m*, weakening variables included."""
    match m:
        case Var(x):
            return {x} if level == 1 else set()
        case Const():
            return set()
        case Lam(x, _, body):
            fv = free_vars(body, level)
            if level == 1:
                fv.discard(x)
            return fv
        case App(f, a):
            return free_vars(f, level) | free_vars(a, level)
        case Quo(_, body):
            return free_vars(body, level + 1)
        case Unq(k, code, args):
            fv = free_vars_seq(args, level)
            if level > k:
                fv |= free_vars(code, level - k)
            return fv
        case CAbs(_, body) | CApp(body, _):
            return free_vars(body, level)
    raise TypeError(f"not a term: {m!r}")


def free_vars_seq(seq: tuple, level: int = 1) -> set[str]:
    out: set[str] = set()
    for e in seq:
        if isinstance(e, WVar):
            if level == 1:
                out.add(e.name)
        else:
            out |= free_vars(e, level)
    return out


def all_names(*objs) -> set[str]:
    """Every term/weakening variable name occurring anywhere (bound or free)."""
    out: set[str] = set()
    for o in objs:
        _names(o, out)
    return out


def _names(o, out):
    match o:
        case Var(x) | WVar(x):
            out.add(x)
        case Const() | Type() | CVar():
            pass
        case Lam(x, _, body):
            out.add(x)
            _names(body, out)
        case App(f, a):
            _names(f, out)
            _names(a, out)
        case Quo(ctx, body):
            out.update(dom(ctx))
            _names(body, out)
        case Unq(_, code, args):
            _names(code, out)
            for a in args:
                _names(a, out)
        case CAbs(_, body) | CApp(body, _):
            _names(body, out)
        case tuple():
            for e in o:
                if isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str):
                    out.add(e[0])
                else:
                    _names(e, out)
        case _:
            raise TypeError(f"unexpected object {o!r}")


# --------------------------------------------------------------------------
# free context variables

def free_context_vars(x) -> set[str]:
    """Free context variables of a type, term, sequence, context or stack."""
    out: set[str] = set()
    _fcv(x, out, frozenset())
    return out


def _fcv(x, out, bound):
    match x:
        case CVar(g):
            if g not in bound:
                out.add(g)
        case Base() | Var() | WVar():
            pass
        case Const(_, ty):
            _fcv(ty, out, bound)
        case Arrow(a, b):
            _fcv(a, out, bound)
            _fcv(b, out, bound)
        case Modal(ctx, body):
            _fcv(ctx, out, bound)
            _fcv(body, out, bound)
        case Forall(g, body) | CAbs(g, body):
            _fcv(body, out, bound | {g})
        case Lam(_, ty, body):
            _fcv(ty, out, bound)
            _fcv(body, out, bound)
        case App(f, a):
            _fcv(f, out, bound)
            _fcv(a, out, bound)
        case Quo(ctx, body):
            _fcv(ctx, out, bound)
            _fcv(body, out, bound)
        case Unq(_, code, args):
            _fcv(code, out, bound)
            _fcv(args, out, bound)
        case CApp(code, seq):
            _fcv(code, out, bound)
            _fcv(seq, out, bound)
        case tuple():
            # sequences, contexts (pairs name/entry) and stacks: pointwise union
            for e in x:
                if isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str):
                    _fcv(e[1], out, bound)
                else:
                    _fcv(e, out, bound)
        case _:
            raise TypeError(f"unexpected object {x!r}")


def all_cvars(*objs) -> set[str]:
    """Every context variable name occurring anywhere, binders included."""
    out: set[str] = set()

    def walk(x):
        match x:
            case CVar(g):
                out.add(g)
            case Forall(g, body) | CAbs(g, body):
                out.add(g)
                walk(body)
            case Base() | Var() | WVar():
                pass
            case Const(_, ty):
                walk(ty)
            case Arrow(a, b) | App(a, b):
                walk(a)
                walk(b)
            case Modal(ctx, body) | Quo(ctx, body):
                walk(ctx)
                walk(body)
            case Lam(_, ty, body):
                walk(ty)
                walk(body)
            case Unq(_, code, args):
                walk(code)
                walk(args)
            case CApp(code, seq):
                walk(code)
                walk(seq)
            case tuple():
                for e in x:
                    if isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str):
                        walk(e[1])
                    else:
                        walk(e)
            case _:
                raise TypeError(f"unexpected object {x!r}")

    for o in objs:
        walk(o)
    return out


# --------------------------------------------------------------------------
# alpha-equivalence via canonical renaming
#
# Both sides are walked in the same order and every binder is renamed to
# "%<n>" from a shared counter; free names are left alone.  Parsed names never
# start with "%", so canonical forms compare with plain ==.

class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0

    def next(self) -> str:
        self.n += 1
        return f"%{self.n}"


def canonical(x):
    """Canonical representative of the alpha-class of a term, type or sequence."""
    c = _Counter()
    if isinstance(x, Term):
        return _canon_term(x, ({},), {}, c)
    if isinstance(x, Type):
        return _canon_type(x, {}, c)
    if isinstance(x, tuple):
        return _canon_tyseq(x, {}, c)
    if isinstance(x, CVar):
        return x
    raise TypeError(f"cannot canonicalize {x!r}")


def _canon_type(t, cenv, c):
    match t:
        case Base():
            return t
        case Arrow(a, b):
            return Arrow(_canon_type(a, cenv, c), _canon_type(b, cenv, c))
        case Modal(ctx, body):
            return Modal(_canon_tyseq(ctx, cenv, c), _canon_type(body, cenv, c))
        case Forall(g, body):
            g2 = c.next()
            return Forall(g2, _canon_type(body, {**cenv, g: g2}, c))
    raise TypeError(f"not a type: {t!r}")


def _canon_tyseq(seq, cenv, c):
    return tuple(CVar(cenv.get(e.name, e.name)) if isinstance(e, CVar)
                 else _canon_type(e, cenv, c) for e in seq)


def _canon_term(m, env, cenv, c):
    # env is a tuple of per-level renaming dicts, innermost (level 1) last
    match m:
        case Var(x):
            return Var(env[-1].get(x, x)) if env else m
        case Const(name, ty):
            return Const(name, _canon_type(ty, cenv, c))
        case Lam(x, ty, body):
            ty2 = _canon_type(ty, cenv, c)
            x2 = c.next()
            inner = env[:-1] + ({**env[-1], x: x2},) if env else ({x: x2},)
            return Lam(x2, ty2, _canon_term(body, inner, cenv, c))
        case App(f, a):
            return App(_canon_term(f, env, cenv, c), _canon_term(a, env, cenv, c))
        case Quo(ctx, body):
            level = {}
            ctx2 = []
            for name, entry in ctx:
                e2 = (CVar(cenv.get(entry.name, entry.name)) if isinstance(entry, CVar)
                      else _canon_type(entry, cenv, c))
                new = c.next()
                level[name] = new
                ctx2.append((new, e2))
            return Quo(tuple(ctx2), _canon_term(body, env + (level,), cenv, c))
        case Unq(k, code, args):
            outer = env[: len(env) - k] if k <= len(env) else ()
            code2 = _canon_term(code, outer, cenv, c)
            return Unq(k, code2, _canon_termseq(args, env, cenv, c))
        case CAbs(g, body):
            g2 = c.next()
            return CAbs(g2, _canon_term(body, env, {**cenv, g: g2}, c))
        case CApp(code, seq):
            return CApp(_canon_term(code, env, cenv, c), _canon_tyseq(seq, cenv, c))
    raise TypeError(f"not a term: {m!r}")


def _canon_termseq(seq, env, cenv, c):
    out = []
    for e in seq:
        if isinstance(e, WVar):
            out.append(WVar(env[-1].get(e.name, e.name)) if env else e)
        else:
            out.append(_canon_term(e, env, cenv, c))
    return tuple(out)


def alpha_equal(a, b) -> bool:
    if a is b:
        return True
    if type(a) is not type(b) and not (isinstance(a, Type) and isinstance(b, Type)):
        return False
    return canonical(a) == canonical(b)


def alpha_equal_seq(a: tuple, b: tuple) -> bool:
    return len(a) == len(b) and canonical(tuple(a)) == canonical(tuple(b))


def term_size(m: Term) -> int:
    """Number of term nodes; type annotations and quotation contexts are not counted."""
    match m:
        case Var() | Const():
            return 1
        case Lam(_, _, body) | Quo(_, body) | CAbs(_, body) | CApp(body, _):
            return 1 + term_size(body)
        case App(f, a):
            return 1 + term_size(f) + term_size(a)
        case Unq(_, code, args):
            return 1 + term_size(code) + sum(1 if isinstance(a, WVar) else term_size(a)
                                             for a in args)
    raise TypeError(f"not a term: {m!r}")
