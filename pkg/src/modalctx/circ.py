"""The linear-temporal calculus: types with a ``next`` modality, past/future stacks.

A judgment ``past | future |- M : T`` has the current context as the last
element of ``past``; ``future[0]`` is the context of the next stage.  Quoting
moves that head into the past, unquoting moves the current context back.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from modalctx.syntax import Arrow, Base, Type, lookup


@dataclass(frozen=True, slots=True)
class Next(Type):
    body: Type


class CircTerm:
    __slots__ = ()

    def __str__(self) -> str:
        from modalctx.printer import format_circ

        return format_circ(self)


@dataclass(frozen=True, slots=True)
class CircVar(CircTerm):
    name: str
    ty: Type | None = None


@dataclass(frozen=True, slots=True)
class CircLam(CircTerm):
    var: str
    annot: Type
    body: CircTerm
    ty: Type | None = None


@dataclass(frozen=True, slots=True)
class CircApp(CircTerm):
    fun: CircTerm
    arg: CircTerm
    ty: Type | None = None


@dataclass(frozen=True, slots=True)
class CircQuo(CircTerm):
    body: CircTerm
    ty: Type | None = None


@dataclass(frozen=True, slots=True)
class CircUnq(CircTerm):
    body: CircTerm
    ty: Type | None = None


@dataclass(frozen=True)
class CircJudgment:
    past: tuple
    future: tuple
    term: CircTerm
    ty: Type


class CircError(Exception):
    kind = "CircError"

    def __init__(self, message: str, path: tuple = ()):
        self.message = message
        self.path = path
        super().__init__(message)

    def __str__(self) -> str:
        where = "/".join(self.path) or "<root>"
        return f"{self.kind} at {where}: {self.message}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, "path": list(self.path)}


def _error(name: str) -> type[CircError]:
    return type(name, (CircError,), {"kind": name})


UnboundVariable = _error("UnboundVariable")
EmptyFuture = _error("EmptyFuture")
EmptyPast = _error("EmptyPast")
NotACircType = _error("NotACircType")
NotAFunction = _error("NotAFunction")
TypeMismatch = _error("TypeMismatch")


def is_circ_type(t) -> bool:
    match t:
        case Base():
            return True
        case Arrow(a, b):
            return is_circ_type(a) and is_circ_type(b)
        case Next(body):
            return is_circ_type(body)
    return False


def ctx_depth(t: Type) -> int:
    """Number of ``next`` constructors along the codomain spine."""
    match t:
        case Base():
            return 0
        case Arrow(_, cod):
            return ctx_depth(cod)
        case Next(body):
            return 1 + ctx_depth(body)
    raise NotACircType(f"{t!r} is not a circ type")


def future_need(m: CircTerm) -> int:
    """How many future contexts a closed use of *m* consumes."""
    match m:
        case CircVar():
            return 0
        case CircLam(_, _, body):
            return future_need(body)
        case CircApp(f, a):
            return max(future_need(f), future_need(a))
        case CircQuo(body):
            return 1 + future_need(body)
        case CircUnq(body):
            return max(0, future_need(body) - 1)
    raise TypeError(f"not a circ term: {m!r}")


def circ_synth(past: tuple, future: tuple | None, m: CircTerm, path: tuple = ()):
    """Synthesize the type of *m*; returns ``(type, annotated term)``.

    When *future* is None it is seeded with as many empty contexts as the
    term's quotations need.
    """
    if future is None:
        future = ((),) * future_need(m)
    return _synth(tuple(past), tuple(future), m, path)


def _synth(past, future, m, path):
    match m:
        case CircVar(x):
            if not past:
                raise EmptyPast(f"variable {x} with an empty past", path)
            ty = lookup(past[-1], x)
            if ty is None:
                raise UnboundVariable(f"variable {x} is not bound in the current context", path)
            return ty, replace(m, ty=ty)
        case CircLam(x, annot, body):
            if not past:
                raise EmptyPast("abstraction with an empty past", path)
            if not is_circ_type(annot):
                raise NotACircType(f"annotation {annot} is not a circ type", path)
            inner = past[:-1] + (past[-1] + ((x, annot),),)
            bt, body2 = _synth(inner, future, body, path + ("body",))
            ty = Arrow(annot, bt)
            return ty, CircLam(x, annot, body2, ty)
        case CircApp(f, a):
            ft, f2 = _synth(past, future, f, path + ("fun",))
            if not isinstance(ft, Arrow):
                raise NotAFunction(f"applied term has type {ft}", path)
            at, a2 = _synth(past, future, a, path + ("arg",))
            if at != ft.dom:
                raise TypeMismatch(f"argument has type {at}, expected {ft.dom}", path)
            return ft.cod, CircApp(f2, a2, ft.cod)
        case CircQuo(body):
            if not future:
                raise EmptyFuture("quotation with no future context left", path)
            bt, body2 = _synth(past + (future[0],), future[1:], body, path + ("body",))
            ty = Next(bt)
            return ty, CircQuo(body2, ty)
        case CircUnq(body):
            if not past:
                raise EmptyPast("unquotation with an empty past", path)
            bt, body2 = _synth(past[:-1], (past[-1],) + future, body, path + ("body",))
            if not isinstance(bt, Next):
                raise TypeMismatch(f"unquoted term has type {bt}, expected a next type", path)
            return bt.body, CircUnq(body2, bt.body)
    raise TypeError(f"not a circ term: {m!r}")


def strip_annotations(m: CircTerm) -> CircTerm:
    match m:
        case CircVar(x):
            return CircVar(x)
        case CircLam(x, annot, body):
            return CircLam(x, annot, strip_annotations(body))
        case CircApp(f, a):
            return CircApp(strip_annotations(f), strip_annotations(a))
        case CircQuo(body):
            return CircQuo(strip_annotations(body))
        case CircUnq(body):
            return CircUnq(strip_annotations(body))
    raise TypeError(f"not a circ term: {m!r}")


def is_annotated(m: CircTerm) -> bool:
    if m.ty is None:
        return False
    match m:
        case CircVar():
            return True
        case CircLam(_, _, body) | CircQuo(body) | CircUnq(body):
            return is_annotated(body)
        case CircApp(f, a):
            return is_annotated(f) and is_annotated(a)
    return False
