"""Substitution families: term substitution, level substitution, context substitution.

A substitution content is an ordered ``dict`` from names to replacements: a
Term for an ordinary variable, a tuple (term sequence) for a weakening
variable.  Weakening-variable replacements are spliced in place wherever the
variable occurs inside an unquotation's argument sequence.
"""

from __future__ import annotations

from modalctx.syntax import (
    App, Arrow, Base, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Term,
    Type, Unq, Var, WVar, all_cvars, all_names, dom, free_context_vars,
    free_vars, free_vars_seq, fresh,
)

Subst = dict


# --------------------------------------------------------------------------
# term substitution  M[sigma]_l

def subst_range_fv(sigma: Subst) -> set[str]:
    out: set[str] = set()
    for r in sigma.values():
        out |= free_vars_seq(r, 1) if isinstance(r, tuple) else free_vars(r, 1)
    return out


def subst_range_cvars(sigma: Subst) -> set[str]:
    out: set[str] = set()
    for r in sigma.values():
        out |= free_context_vars(r)
    return out


def apply_subst(m: Term, sigma: Subst, level: int = 1) -> Term:
    """Capture-avoiding substitution of level-``level`` free variables."""
    if level < 1:
        raise ValueError("substitution level must be >= 1")
    if not sigma:
        return m
    return _Subst(sigma).term(m, level)


def apply_subst_seq(seq: tuple, sigma: Subst, level: int = 1) -> tuple:
    if not sigma:
        return seq
    return _Subst(sigma).seq(seq, level)


class _Subst:
    def __init__(self, sigma: Subst):
        self.sigma = sigma
        self.fv = subst_range_fv(sigma)
        self.cv = subst_range_cvars(sigma)

    def with_sigma(self, sigma):
        child = _Subst.__new__(_Subst)
        child.sigma, child.fv, child.cv = sigma, self.fv, self.cv
        return child

    def term(self, m, l):
        sigma = self.sigma
        match m:
            case Var(x):
                if l == 1 and x in sigma and not isinstance(sigma[x], tuple):
                    return sigma[x]
                return m
            case Const():
                return m
            case App(f, a):
                return App(self.term(f, l), self.term(a, l))
            case Lam(x, ty, body):
                if l > 1:
                    return Lam(x, ty, self.term(body, l))
                if x in self.fv:
                    avoid = self.fv | set(sigma) | all_names(body)
                    x2 = fresh(x, avoid)
                    body = apply_subst(body, {x: Var(x2)}, 1)
                    x = x2
                if x in sigma:
                    inner = {k: v for k, v in sigma.items() if k != x}
                    if not inner:
                        return Lam(x, ty, body)
                    return Lam(x, ty, self.with_sigma(inner).term(body, 1))
                return Lam(x, ty, self.term(body, 1))
            case Quo(ctx, body):
                return Quo(ctx, self.term(body, l + 1))
            case Unq(k, code, args):
                if l > k:
                    code = self.term(code, l - k)
                return Unq(k, code, self.seq(args, l))
            case CAbs(g, body):
                if g in self.cv:
                    g2 = fresh(g, self.cv | all_cvars(body))
                    body = rename_cvar(body, g, g2)
                    g = g2
                return CAbs(g, self.term(body, l))
            case CApp(code, seq):
                return CApp(self.term(code, l), seq)
        raise TypeError(f"not a term: {m!r}")

    def seq(self, seq, l):
        out = []
        for e in seq:
            if isinstance(e, WVar):
                r = self.sigma.get(e.name) if l == 1 else None
                if isinstance(r, tuple):
                    out.extend(r)
                else:
                    out.append(e)
            else:
                out.append(self.term(e, l))
        return tuple(out)


def match_seq(args: tuple, ctx: tuple) -> Subst | None:
    """The substitution ``args/ctx`` or None when it is undefined.

    A term matches an ordinary binding and a weakening variable matches a
    weakening binding; lengths must agree.
    """
    if len(args) != len(ctx):
        return None
    sigma: Subst = {}
    for a, (name, entry) in zip(args, ctx):
        if isinstance(entry, CVar):
            if not isinstance(a, WVar):
                return None
            sigma[name] = (a,)
        else:
            if isinstance(a, WVar):
                return None
            sigma[name] = a
    return sigma


# --------------------------------------------------------------------------
# level substitution  M up^n_l

def apply_level_subst(m: Term, n: int, level: int = 1) -> Term:
    if level < 1 or n < 0:
        raise ValueError("level substitution needs level >= 1 and n >= 0")
    match m:
        case Var() | Const():
            return m
        case App(f, a):
            return App(apply_level_subst(f, n, level), apply_level_subst(a, n, level))
        case Lam(x, ty, body):
            return Lam(x, ty, apply_level_subst(body, n, level))
        case Quo(ctx, body):
            return Quo(ctx, apply_level_subst(body, n, level + 1))
        case Unq(k, code, args):
            args = tuple(a if isinstance(a, WVar) else apply_level_subst(a, n, level)
                         for a in args)
            if level <= k:
                return Unq(k + n - 1, code, args)
            return Unq(k, apply_level_subst(code, n, level - k), args)
        case CAbs(g, body):
            return CAbs(g, apply_level_subst(body, n, level))
        case CApp(code, seq):
            return CApp(apply_level_subst(code, n, level), seq)
    raise TypeError(f"not a term: {m!r}")


# --------------------------------------------------------------------------
# context substitution  X[S/g]

def gen_sym(avoid, tyseq: tuple) -> tuple:
    """A context with one fresh binder per entry of *tyseq*.

    Ordinary entries get ``x<k>`` names, context-variable entries ``i<k>``;
    all names are distinct from each other and from *avoid*.
    """
    used = set(avoid)
    ctx = []
    for entry in tyseq:
        name = fresh("i" if isinstance(entry, CVar) else "x", used)
        used.add(name)
        ctx.append((name, entry))
    return tuple(ctx)


def weaken(g: str, tyseq: tuple, ctx: tuple, avoid=()) -> tuple[tuple, Subst]:
    """Replace every binding ``i:g`` of *ctx* by fresh bindings for *tyseq*.

    Returns the new context and the substitution sending each such ``i`` to
    the sequence of its replacement variables.  Binding order is preserved.
    """
    used = set(dom(ctx)) | set(avoid)
    out: list = []
    sigma: Subst = {}
    for name, entry in ctx:
        if isinstance(entry, CVar):
            if entry.name == g:
                block = gen_sym(used, tyseq)
                used.update(n for n, _ in block)
                out.extend(block)
                sigma[name] = tuple(WVar(n) if isinstance(e, CVar) else Var(n)
                                    for n, e in block)
            else:
                out.append((name, entry))
        else:
            out.append((name, ctx_subst(entry, tyseq, g)))
    return tuple(out), sigma


def rename_cvar(x, old: str, new: str):
    """Rename free occurrences of context variable *old* to *new* (no weakening)."""
    match x:
        case CVar(n):
            return CVar(new) if n == old else x
        case Base() | Var() | WVar() | Const():
            return x
        case Arrow(a, b):
            return Arrow(rename_cvar(a, old, new), rename_cvar(b, old, new))
        case Modal(ctx, body):
            return Modal(rename_cvar(ctx, old, new), rename_cvar(body, old, new))
        case Forall(g, body):
            return x if g == old else Forall(g, rename_cvar(body, old, new))
        case CAbs(g, body):
            return x if g == old else CAbs(g, rename_cvar(body, old, new))
        case Lam(v, ty, body):
            return Lam(v, rename_cvar(ty, old, new), rename_cvar(body, old, new))
        case App(f, a):
            return App(rename_cvar(f, old, new), rename_cvar(a, old, new))
        case Quo(ctx, body):
            ctx = tuple((n, rename_cvar(e, old, new)) for n, e in ctx)
            return Quo(ctx, rename_cvar(body, old, new))
        case Unq(k, code, args):
            return Unq(k, rename_cvar(code, old, new), rename_cvar(args, old, new))
        case CApp(code, seq):
            return CApp(rename_cvar(code, old, new), rename_cvar(seq, old, new))
        case tuple():
            return tuple(rename_cvar(e, old, new) for e in x)
    raise TypeError(f"unexpected object {x!r}")


def ctx_subst(x, tyseq: tuple, g: str):
    """Substitute the type sequence *tyseq* for context variable *g* in *x*.

    *x* may be a type, a type sequence, a term or a term sequence (the two
    kinds of sequence are told apart by their entries).
    """
    tyseq = tuple(tyseq)
    return _CtxSubst(tyseq, g).any(x)


class _CtxSubst:
    def __init__(self, tyseq, g):
        self.tyseq = tyseq
        self.g = g
        self.cv = free_context_vars(tyseq)

    def any(self, x):
        if isinstance(x, Type):
            return self.type(x)
        if isinstance(x, Term):
            return self.term(x)
        if isinstance(x, CVar):
            return self.tyseq_(( x,))
        if isinstance(x, tuple):
            if any(isinstance(e, (Term, WVar)) for e in x):
                return self.termseq(x)
            return self.tyseq_(x)
        raise TypeError(f"unexpected object {x!r}")

    def _binder(self, d, body):
        """Rename binder *d* away from the substituted sequence when it would capture."""
        if d in self.cv and self.g in free_context_vars(body):
            d2 = fresh(d, self.cv | all_cvars(body) | {self.g})
            return d2, rename_cvar(body, d, d2)
        return d, body

    def type(self, t):
        match t:
            case Base():
                return t
            case Arrow(a, b):
                return Arrow(self.type(a), self.type(b))
            case Modal(ctx, body):
                return Modal(self.tyseq_(ctx), self.type(body))
            case Forall(d, body):
                if d == self.g:
                    return t
                d, body = self._binder(d, body)
                return Forall(d, self.type(body))
        raise TypeError(f"not a type: {t!r}")

    def tyseq_(self, seq):
        out = []
        for e in seq:
            if isinstance(e, CVar):
                if e.name == self.g:
                    out.extend(self.tyseq)
                else:
                    out.append(e)
            else:
                out.append(self.type(e))
        return tuple(out)

    def termseq(self, seq):
        return tuple(e if isinstance(e, WVar) else self.term(e) for e in seq)

    def term(self, m):
        match m:
            case Var() | Const():
                return m
            case Lam(x, ty, body):
                return Lam(x, self.type(ty), self.term(body))
            case App(f, a):
                return App(self.term(f), self.term(a))
            case Quo(ctx, body):
                new_ctx, sigma = weaken(self.g, self.tyseq, ctx, avoid=all_names(body))
                return Quo(new_ctx, apply_subst(self.term(body), sigma, 1))
            case Unq(k, code, args):
                return Unq(k, self.term(code), self.termseq(args))
            case CAbs(d, body):
                if d == self.g:
                    return m
                d, body = self._binder(d, body)
                return CAbs(d, self.term(body))
            case CApp(code, seq):
                return CApp(self.term(code), self.tyseq_(seq))
        raise TypeError(f"not a term: {m!r}")


def judgment_ctx_subst(stack: tuple, m: Term, ty: Type, tyseq: tuple, g: str):
    """Context substitution on a whole judgment ``stack |- m : ty``.

    Each stack context is weakened and the resulting substitution is applied
    to the term at that context's level.
    """
    avoid = all_names(m, stack)
    new_stack = []
    sigmas = []
    for ctx in stack:
        new_ctx, sigma = weaken(g, tuple(tyseq), ctx, avoid=avoid)
        avoid |= set(dom(new_ctx))
        new_stack.append(new_ctx)
        sigmas.append(sigma)
    out = ctx_subst(m, tyseq, g)
    depth = len(stack)
    for idx, sigma in enumerate(sigmas):
        out = apply_subst(out, sigma, depth - idx)
    return tuple(new_stack), out, ctx_subst(ty, tyseq, g)
