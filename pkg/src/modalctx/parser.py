"""Concrete syntax for all three calculi and for declaration files.

Identifier roles are resolved by scope while parsing: a name bound by
``forall``/``/\\`` (or listed under ``cvars``) is a context variable, a
binding ``i:g`` with ``g`` a context variable is a weakening binding, and a
name declared with ``const`` is a constant unless shadowed.

Declaration files::

    const if : bool -> bool -> bool -> bool;
    box k ex1 = \\x:[u](s -> t). ... : [u](s -> t) -> [u]s -> [u]t;
    forallbox k wit cvars (d) stack {} = ... : ...;
    circ kax future {} = \\x:next (s -> t). \\y:next s. `(~x ~y);
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from modalctx.circ import CircApp, CircLam, CircQuo, CircUnq, CircVar, Next
from modalctx.syntax import (
    App, Arrow, Base, CAbs, CApp, Const, CVar, Forall, Lam, Modal, Quo, Unq,
    Var, WVar,
)
from modalctx.typecheck import ModalVariant


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->|→)
  | (?P<biglam>/\\|Λ)
  | (?P<lam>\\|λ)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|∀|○)
  | (?P<sym>[`~{}()\[\],:.;@=])
""", re.VERBOSE)

_KEYWORD_ALIASES = {"∀": "forall", "○": "next"}
RESERVED = {"forall", "next", "const", "box", "forallbox", "circ", "stack", "future", "cvars"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "ident":
                tok = _KEYWORD_ALIASES.get(tok, tok)
            out.append(Token(kind, tok, line, m.start() - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Declaration:
    calculus: str  # box | forallbox | circ
    name: str
    term: object
    ty: object = None
    variant: ModalVariant | None = None
    cvars: tuple = ()
    stack: tuple = ((),)
    future: tuple | None = None
    line: int = 0


@dataclass
class SourceFile:
    consts: dict = field(default_factory=dict)
    decls: list = field(default_factory=list)


class _Parser:
    def __init__(self, text: str, consts: dict | None = None):
        self.toks = tokenize(text)
        self.pos = 0
        self.consts = dict(consts or {})

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def fail(self, message: str):
        raise ParseError(message, self.tok.line, self.tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def name(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in RESERVED:
            self.fail(f"expected a name, found {t.text or 'end of input'!r}")
        self.pos += 1
        return t.text

    def end(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")

    # -- types

    def type_(self, cv: frozenset):
        if self.accept("forall"):
            g = self.name()
            self.expect(".")
            return Forall(g, self.type_(cv | {g}))
        lhs = self.prefix_type(cv)
        if self.tok.kind == "arrow":
            self.pos += 1
            return Arrow(lhs, self.type_(cv))
        return lhs

    def prefix_type(self, cv):
        if self.accept("["):
            seq = self.tyseq(cv, "]")
            self.expect("]")
            return Modal(seq, self.prefix_type(cv))
        if self.accept("next"):
            return Next(self.prefix_type(cv))
        if self.accept("("):
            t = self.type_(cv)
            self.expect(")")
            return t
        n = self.name()
        if n in cv:
            self.pos -= 1
            self.fail(f"context variable {n} used as a type")
        return Base(n)

    def _cvar_entry(self, cv, closers) -> bool:
        return (self.tok.kind == "ident" and self.tok.text in cv
                and self.peek().text in closers)

    def tyseq(self, cv, close: str) -> tuple:
        out = []
        if self.at(close):
            return ()
        while True:
            if self._cvar_entry(cv, (",", close)):
                out.append(CVar(self.name()))
            else:
                out.append(self.type_(cv))
            if not self.accept(","):
                return tuple(out)

    def context(self, cv) -> tuple:
        self.expect("{")
        out = []
        if not self.at("}"):
            while True:
                x = self.name()
                self.expect(":")
                if self._cvar_entry(cv, (",", "}")):
                    out.append((x, CVar(self.name())))
                else:
                    out.append((x, self.type_(cv)))
                if not self.accept(","):
                    break
        self.expect("}")
        return tuple(out)

    # -- box / forall-box terms

    @staticmethod
    def _level(ctx) -> dict:
        return {x: "weak" if isinstance(e, CVar) else "term" for x, e in ctx}

    def term(self, env: tuple, cv: frozenset):
        if self.tok.kind == "lam":
            self.pos += 1
            x = self.name()
            self.expect(":")
            ty = self.type_(cv)
            self.expect(".")
            inner = env[:-1] + ({**env[-1], x: "term"},) if env else ({x: "term"},)
            return Lam(x, ty, self.term(inner, cv))
        if self.tok.kind == "biglam":
            self.pos += 1
            g = self.name()
            self.expect(".")
            return CAbs(g, self.term(env, cv | {g}))
        if self.at("`"):
            self.pos += 1
            ctx = self.context(cv)
            names = [x for x, _ in ctx]
            if len(names) != len(set(names)):
                self.fail("quotation context binds a name twice")
            return Quo(ctx, self.term(env + (self._level(ctx),), cv))
        return self.app(env, cv)

    def _starts_atom(self) -> bool:
        t = self.tok
        return (t.kind == "ident" and t.text not in RESERVED) or t.text in ("(", "~")

    def _starts_binder(self) -> bool:
        return self.tok.kind in ("lam", "biglam") or self.at("`")

    def app(self, env, cv):
        m = self.postfix(env, cv)
        while True:
            if self._starts_atom():
                m = App(m, self.postfix(env, cv))
            elif self._starts_binder():
                return App(m, self.term(env, cv))
            else:
                return m

    def postfix(self, env, cv):
        m = self.atom(env, cv)
        while self.accept("@"):
            self.expect("(")
            seq = self.tyseq(cv, ")")
            self.expect(")")
            m = CApp(m, seq)
        return m

    def atom(self, env, cv):
        if self.accept("("):
            m = self.term(env, cv)
            self.expect(")")
            return m
        if self.accept("~"):
            if self.tok.kind != "num":
                self.fail("expected an unquote level")
            n = int(self.tok.text)
            self.pos += 1
            self.expect("{")
            code = self.term(env[: max(0, len(env) - n)], cv)
            self.expect("}")
            self.expect("(")
            args = self.termseq(env, cv)
            self.expect(")")
            return Unq(n, code, args)
        x = self.name()
        kind = env[-1].get(x) if env else None
        if kind == "weak":
            self.pos -= 1
            self.fail(f"weakening variable {x} used as a term")
        if kind is None and x in self.consts:
            return Const(x, self.consts[x])
        return Var(x)

    def termseq(self, env, cv) -> tuple:
        out = []
        if self.at(")"):
            return ()
        while True:
            t = self.tok
            if (t.kind == "ident" and env and env[-1].get(t.text) == "weak"
                    and self.peek().text in (",", ")")):
                self.pos += 1
                out.append(WVar(t.text))
            else:
                out.append(self.term(env, cv))
            if not self.accept(","):
                return tuple(out)

    # -- circ terms

    def circ_term(self):
        if self.tok.kind == "lam":
            self.pos += 1
            x = self.name()
            self.expect(":")
            ty = self.type_(frozenset())
            self.expect(".")
            return CircLam(x, ty, self.circ_term())
        m = self.circ_atom()
        while True:
            if self._starts_atom() or self.at("`"):
                m = CircApp(m, self.circ_atom())
            elif self.tok.kind == "lam":
                return CircApp(m, self.circ_term())
            else:
                return m

    def circ_atom(self):
        if self.accept("("):
            m = self.circ_term()
            self.expect(")")
            return m
        if self.accept("`"):
            return CircQuo(self.circ_atom())
        if self.accept("~"):
            return CircUnq(self.circ_atom())
        return CircVar(self.name())

    # -- declarations

    def file(self) -> SourceFile:
        src = SourceFile(consts=self.consts)
        seen = set()
        while self.tok.kind != "eof":
            line = self.tok.line
            if self.accept("const"):
                x = self.name()
                self.expect(":")
                self.consts[x] = self.type_(frozenset())
                self.expect(";")
                continue
            d = self.declaration(line)
            if d.name in seen:
                raise ParseError(f"duplicate declaration {d.name}", line, 1)
            seen.add(d.name)
            src.decls.append(d)
        return src

    def declaration(self, line: int) -> Declaration:
        if self.accept("circ"):
            name = self.name()
            stack = ((),)
            future = None
            if self.accept("stack"):
                stack = self.contexts(frozenset())
            if self.accept("future"):
                future = self.contexts(frozenset())
            self.expect("=")
            m = self.circ_term()
            ty = self.type_(frozenset()) if self.accept(":") else None
            self.expect(";")
            return Declaration("circ", name, m, ty, None, (), stack, future, line)
        if self.at("box") or self.at("forallbox"):
            calculus = self.tok.text
            self.pos += 1
            try:
                variant = ModalVariant.parse(self.tok.text)
            except ValueError as exc:
                self.fail(str(exc))
            self.pos += 1
            name = self.name()
            cvars: tuple = ()
            if self.accept("cvars"):
                self.expect("(")
                names = []
                if not self.at(")"):
                    names.append(self.name())
                    while self.accept(","):
                        names.append(self.name())
                self.expect(")")
                cvars = tuple(names)
            cv = frozenset(cvars)
            stack = ((),)
            if self.accept("stack"):
                stack = self.contexts(cv)
            self.expect("=")
            env = tuple(self._level(ctx) for ctx in stack)
            m = self.term(env, cv)
            ty = self.type_(cv) if self.accept(":") else None
            self.expect(";")
            if calculus == "box" and (cvars or uses_polymorphism(m, stack)):
                raise ParseError(f"box declaration {name} uses context polymorphism; "
                                 "declare it as forallbox", line, 1)
            return Declaration(calculus, name, m, ty, variant, cvars, stack, None, line)
        self.fail(f"expected a declaration, found {self.tok.text or 'end of input'!r}")

    def contexts(self, cv) -> tuple:
        out = []
        while self.at("{"):
            out.append(self.context(cv))
        return tuple(out)


def uses_polymorphism(m, stack=()) -> bool:
    from modalctx.syntax import free_context_vars, all_cvars

    if all_cvars(m) or free_context_vars(stack):
        return True
    return _has_poly(m)


def _has_poly(m) -> bool:
    match m:
        case CAbs() | CApp() | WVar():
            return True
        case Var() | Const():
            return False
        case Lam(_, _, body):
            return _has_poly(body)
        case App(f, a):
            return _has_poly(f) or _has_poly(a)
        case Quo(ctx, body):
            return any(isinstance(e, CVar) for _, e in ctx) or _has_poly(body)
        case Unq(_, code, args):
            return _has_poly(code) or any(_has_poly(a) for a in args)
    return False


# --------------------------------------------------------------------------
# entry points

def parse_type(text: str, cvars=()):
    p = _Parser(text)
    t = p.type_(frozenset(cvars))
    p.end()
    return t


def parse_term(text: str, stack: tuple = ((),), cvars=(), consts: dict | None = None):
    p = _Parser(text, consts)
    env = tuple(_Parser._level(ctx) for ctx in stack)
    m = p.term(env, frozenset(cvars))
    p.end()
    return m


def parse_circ_term(text: str):
    p = _Parser(text)
    m = p.circ_term()
    p.end()
    return m


def parse_context(text: str, cvars=()) -> tuple:
    p = _Parser(text)
    ctx = p.context(frozenset(cvars))
    p.end()
    return ctx


def parse_stack(text: str, cvars=()) -> tuple:
    p = _Parser(text)
    stack = p.contexts(frozenset(cvars))
    p.end()
    return stack


def parse_file(text: str) -> SourceFile:
    return _Parser(text).file()


CORPORA = ("box", "forallbox", "circ")


def corpus_text(name: str) -> str:
    """Source text of a bundled example file (``box``, ``forallbox`` or ``circ``)."""
    from importlib.resources import files

    if name not in CORPORA:
        raise KeyError(f"unknown corpus {name!r}")
    return (files("modalctx") / "corpus" / f"{name}.ctx").read_text(encoding="utf-8")


def load_corpus(name: str) -> SourceFile:
    return parse_file(corpus_text(name))
