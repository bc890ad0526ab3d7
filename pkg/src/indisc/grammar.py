"""Concrete syntax: a recursive-descent parser and the canonical printer.

Canonical text is fully parenthesized at binary connectives and terms::

    exists x1 < x2 . (x1 + x1) = x2
    (~ x1 = 0 \\/ I(S(x1)))

The parser is more lenient than the printer: it accepts operator precedence
(``*`` over ``+``; ``~`` over ``/\\`` over ``\\/`` over ``->``), decimal
literals, and the single-letter variable sugar ``a`` .. ``y`` which is mapped
into the x-namespace in first-use order.
"""

from __future__ import annotations

import re
from typing import Literal

from .errors import FormulaError, FormulaSyntaxError
from .syntax import (
    Add, And, BddExists, BddForall, Eq, Exists, Forall, Formula, Implies, InI,
    Lt, Mul, Not, Or, Succ, Term, Var, X, Z, Zero, numeral, BINARY, QUANTIFIERS,
)

Language = Literal["LA", "LA_I"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<word>[A-Za-z]+\d*)|(?P<op>\\/|/\\|->|[()=<+*~.]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


_XVAR = re.compile(r"x(\d+)$")
_ZVAR = re.compile(r"z(\d+)$")
_SUGAR = re.compile(r"[a-y]$")
_KEYWORDS = {"exists", "forall", "S", "I"}


class _Parser:
    def __init__(self, text: str, language: Language, names: dict[str, Var]):
        self.text = text
        self.language = language
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names
        self.reserved = set()
        for kind, val, _ in self.toks:
            m = _XVAR.match(val) if kind == "word" else None
            if m and int(m.group(1)) >= 1:
                self.reserved.add(int(m.group(1)))
        self.reserved |= {v.index for v in names.values() if v.ns == X}
        self.furthest = (0, "syntax error")

    # -- token helpers
    def peek(self, k: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, msg: str):
        pos = self.peek()[2]
        if pos >= self.furthest[0]:
            self.furthest = (pos, msg)
        raise FormulaSyntaxError(msg, pos, self.text)

    def accept(self, val: str) -> bool:
        if self.peek()[1] == val and self.peek()[0] in ("op", "word"):
            self.i += 1
            return True
        return False

    def expect(self, val: str) -> None:
        if not self.accept(val):
            self.fail(f"expected {val!r}, found {self.peek()[1] or 'end of input'!r}")

    # -- variables
    def variable(self) -> Var:
        kind, val, pos = self.peek()
        if kind != "word" or val in _KEYWORDS:
            self.fail("expected a variable")
        self.i += 1
        m = _XVAR.match(val)
        if m:
            if int(m.group(1)) < 1:
                raise FormulaSyntaxError("variable indices start at 1", pos, self.text)
            return Var(X, int(m.group(1)))
        m = _ZVAR.match(val)
        if m:
            if int(m.group(1)) < 1:
                raise FormulaSyntaxError("variable indices start at 1", pos, self.text)
            return Var(Z, int(m.group(1)))
        if _SUGAR.match(val):
            if val not in self.names:
                idx = 1
                while idx in self.reserved:
                    idx += 1
                self.reserved.add(idx)
                self.names[val] = Var(X, idx)
            return self.names[val]
        raise FormulaSyntaxError(f"bad variable name {val!r}", pos, self.text)

    # -- terms
    def term(self) -> Term:
        t = self.product()
        while self.accept("+"):
            t = Add(t, self.product())
        return t

    def product(self) -> Term:
        t = self.factor()
        while self.accept("*"):
            t = Mul(t, self.factor())
        return t

    def factor(self) -> Term:
        kind, val, _ = self.peek()
        if kind == "num":
            self.i += 1
            return numeral(int(val)) if val != "0" else Zero()
        if self.accept("S"):
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Succ(t)
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        return self.variable()

    # -- formulas
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.accept("\\/"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.accept("/\\"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("~"):
            return Not(self.unary())
        kind, val, pos = self.peek()
        if kind == "word" and val in ("exists", "forall"):
            self.i += 1
            v = self.variable()
            bound = self.term() if self.accept("<") else None
            self.expect(".")
            body = self.formula()
            try:
                if bound is None:
                    return (Exists if val == "exists" else Forall)(v, body)
                return (BddExists if val == "exists" else BddForall)(v, bound, body)
            except FormulaError as e:
                raise FormulaSyntaxError(str(e), pos, self.text) from None
        return self.primary()

    def primary(self) -> Formula:
        start = self.i
        try:
            return self.atom()
        except FormulaSyntaxError as e:
            if getattr(e, "fatal", False):
                raise
            self.i = start
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        pos, msg = self.furthest
        raise FormulaSyntaxError(msg, pos, self.text)

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "word" and val == "I":
            if self.language != "LA_I":
                err = FormulaSyntaxError("predicate I is not part of L_A", pos, self.text)
                err.fatal = True
                raise err
            self.i += 1
            self.expect("(")
            t = self.term()
            self.expect(")")
            return InI(t)
        t1 = self.term()
        if self.accept("="):
            return Eq(t1, self.term())
        if self.accept("<"):
            return Lt(t1, self.term())
        self.fail("expected '=' or '<'")


def parse_formula(
    text: str, language: Language = "LA", names: dict[str, Var] | None = None
) -> Formula:
    """Parse one formula.

    ``names`` (optional, updated in place) carries the sugar-letter mapping,
    so several formulas can share it.
    """
    if language not in ("LA", "LA_I"):
        raise ValueError(f"unknown language {language!r}")
    p = _Parser(text, language, {} if names is None else names)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected trailing input {val!r}", pos, text)
    return f


def render_term(t: Term) -> str:
    depth = 0
    while isinstance(t, Succ):
        t = t.t
        depth += 1
    if depth:
        return "S(" * depth + render_term(t) + ")" * depth
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Var):
        return str(t)
    op = "+" if isinstance(t, Add) else "*"
    return f"({render_term(t.t1)} {op} {render_term(t.t2)})"


_OPS = {Or: "\\/", And: "/\\", Implies: "->"}


def _open_ended(f: Formula) -> bool:
    while isinstance(f, Not):
        f = f.f
    return isinstance(f, QUANTIFIERS)


def render(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"{render_term(f.t1)} = {render_term(f.t2)}"
    if isinstance(f, Lt):
        return f"{render_term(f.t1)} < {render_term(f.t2)}"
    if isinstance(f, InI):
        return f"I({render_term(f.t)})"
    if isinstance(f, Not):
        return f"~ {render(f.f)}"
    if isinstance(f, BINARY):
        parts = []
        for g in (f.f1, f.f2):
            s = render(g)
            parts.append(f"({s})" if _open_ended(g) else s)
        return f"({parts[0]} {_OPS[type(f)]} {parts[1]})"
    word = "exists" if isinstance(f, (Exists, BddExists)) else "forall"
    if isinstance(f, (BddExists, BddForall)):
        return f"{word} {f.var} < {render_term(f.bound)} . {render(f.f)}"
    return f"{word} {f.var} . {render(f.f)}"


def read_corpus(text: str, language: Language = "LA") -> list[Formula]:
    """One formula per line; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(parse_formula(s, language))
        except FormulaSyntaxError as e:
            raise FormulaSyntaxError(f"line {lineno}: {e}", e.pos, s) from None
    return out
