"""Syntax-directed type synthesis for the box calculus and its polymorphic extension.

A stack is a tuple of contexts with the object-level context last.  Variable
lookups only ever look at that last context; everything deeper is reachable
through unquotation alone.
"""

from __future__ import annotations

import enum

from modalctx.subst import ctx_subst
from modalctx.syntax import (
    App, Arrow, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Term, Unq,
    Var, WVar, alpha_equal, alpha_equal_seq, free_context_vars, is_distinct,
    lookup, rg,
)


class ModalVariant(enum.Enum):
    K = "k"
    T = "t"
    K4 = "k4"
    S4 = "s4"

    def permits(self, n: int) -> bool:
        match self:
            case ModalVariant.K:
                return n == 1
            case ModalVariant.T:
                return n in (0, 1)
            case ModalVariant.K4:
                return n >= 1
            case ModalVariant.S4:
                return n >= 0

    @classmethod
    def parse(cls, tag: str) -> "ModalVariant":
        try:
            return cls(tag.lower())
        except ValueError:
            raise ValueError(f"unknown modal variant {tag!r} (expected k, t, k4 or s4)") from None


class TypeCheckError(Exception):
    """Base class; carries the rule attempted, the stack and the subterm path."""

    kind = "TypeCheckError"

    def __init__(self, message: str, rule: str, stack: tuple = (), path: tuple = ()):
        self.message = message
        self.rule = rule
        self.stack = stack
        self.path = path
        super().__init__(message)

    def __str__(self) -> str:
        from modalctx.printer import format_stack

        where = "/".join(self.path) or "<root>"
        return (f"{self.kind} in ({self.rule}) at {where}: {self.message}\n"
                f"  stack: {format_stack(self.stack)}")

    def to_json(self) -> dict:
        from modalctx.printer import format_stack

        return {"kind": self.kind, "rule": self.rule, "message": self.message,
                "stack": format_stack(self.stack), "path": list(self.path)}


def _error(name: str) -> type[TypeCheckError]:
    return type(name, (TypeCheckError,), {"kind": name})


UnboundVariable = _error("UnboundVariable")
UnboundWeakeningVariable = _error("UnboundWeakeningVariable")
LevelViolation = _error("LevelViolation")
ContextMismatch = _error("ContextMismatch")
NotAFunction = _error("NotAFunction")
NotACode = _error("NotACode")
NotPolymorphic = _error("NotPolymorphic")
CVarEscape = _error("CVarEscape")
TypeMismatch = _error("TypeMismatch")
IllFormedContext = _error("IllFormedContext")


def _show(x) -> str:
    from modalctx.printer import format_any

    return format_any(x)


def extend(stack: tuple, name: str, entry) -> tuple:
    """Append a binding to the object-level context of *stack*."""
    return stack[:-1] + (stack[-1] + ((name, entry),),)


def synth(variant: ModalVariant, stack: tuple, m: Term, path: tuple = ()):
    """The type of *m* under *stack*, or a TypeCheckError."""
    match m:
        case Var(x):
            if not stack:
                raise UnboundVariable(f"variable {x} under an empty stack", "Var", stack, path)
            entry = lookup(stack[-1], x)
            if entry is None:
                raise UnboundVariable(f"variable {x} is not bound in the current context",
                                      "Var", stack, path)
            if isinstance(entry, CVar):
                raise UnboundVariable(f"{x} is a weakening variable, not a term variable",
                                      "Var", stack, path)
            return entry
        case Const(_, ty):
            return ty
        case Lam(x, ty, body):
            if not stack:
                raise UnboundVariable("abstraction under an empty stack", "Abs", stack, path)
            return Arrow(ty, synth(variant, extend(stack, x, ty), body, path + ("body",)))
        case App(f, a):
            if not stack:
                raise UnboundVariable("application under an empty stack", "App", stack, path)
            ft = synth(variant, stack, f, path + ("fun",))
            if not isinstance(ft, Arrow):
                raise NotAFunction(f"applied term has type {_show(ft)}", "App", stack, path)
            at = synth(variant, stack, a, path + ("arg",))
            if not alpha_equal(ft.dom, at):
                raise TypeMismatch(f"argument has type {_show(at)}, expected {_show(ft.dom)}",
                                   "App", stack, path)
            return ft.cod
        case Quo(ctx, body):
            if not is_distinct(ctx):
                raise IllFormedContext("quotation context binds a name twice", "Quo", stack, path)
            return Modal(rg(ctx), synth(variant, stack + (ctx,), body, path + ("body",)))
        case Unq(n, code, args):
            if not variant.permits(n):
                raise LevelViolation(f"unquote level {n} is not permitted in {variant.name}",
                                     "Unq", stack, path)
            if len(stack) < n:
                raise LevelViolation(f"unquote level {n} exceeds stack depth {len(stack)}",
                                     "Unq", stack, path)
            ct = synth(variant, stack[: len(stack) - n], code, path + ("code",))
            if not isinstance(ct, Modal):
                raise NotACode(f"unquoted term has type {_show(ct)}", "Unq", stack, path)
            seq = synth_seq(variant, stack, args, path + ("args",))
            if not alpha_equal_seq(seq, ct.ctx):
                raise ContextMismatch(
                    f"arguments have types ({_show(seq)}), code expects ({_show(ct.ctx)})",
                    "Unq", stack, path)
            return ct.body
        case CAbs(g, body):
            if g in free_context_vars(stack):
                raise CVarEscape(f"context variable {g} is free in the stack", "Poly", stack, path)
            return Forall(g, synth(variant, stack, body, path + ("body",)))
        case CApp(code, seq):
            ct = synth(variant, stack, code, path + ("code",))
            if not isinstance(ct, Forall):
                raise NotPolymorphic(f"instantiated term has type {_show(ct)}", "Inst", stack, path)
            return ctx_subst(ct.body, seq, ct.cvar)
    raise TypeError(f"not a term: {m!r}")


def synth_seq(variant: ModalVariant, stack: tuple, args: tuple, path: tuple = ()) -> tuple:
    out = []
    for idx, a in enumerate(args):
        if isinstance(a, WVar):
            entry = lookup(stack[-1], a.name) if stack else None
            if not isinstance(entry, CVar):
                raise UnboundWeakeningVariable(
                    f"{a.name} is not bound as a weakening variable in the current context",
                    "SeqC", stack, path + (str(idx),))
            out.append(entry)
        else:
            out.append(synth(variant, stack, a, path + (str(idx),)))
    return tuple(out)


def check(variant: ModalVariant, stack: tuple, m: Term, ty) -> None:
    got = synth(variant, stack, m)
    if not alpha_equal(got, ty):
        raise TypeMismatch(f"synthesized {_show(got)}, expected {_show(ty)}", "Check", stack, ())


def typechecks(variant: ModalVariant, stack: tuple, m: Term) -> bool:
    try:
        synth(variant, stack, m)
    except TypeCheckError:
        return False
    return True
