"""Abstract syntax for arithmetic formulas, optionally with the predicate I.

Terms are built from ``0``, variables, successor, ``+`` and ``*``; formulas
from ``=``, ``<``, ``I(.)``, the connectives and (bounded) quantifiers.  All
nodes are frozen dataclasses, so formulas are hashable and can be used as
cache keys.

Variables live in two disjoint namespaces: ordinary ``x1, x2, ...`` and the
reserved ``z1, z2, ...`` used only by the star transformation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import FormulaError

X = "x"
Z = "z"


@dataclass(frozen=True, slots=True, order=True)
class Var:
    ns: str
    index: int

    def __post_init__(self) -> None:
        if self.ns not in (X, Z):
            raise FormulaError(f"unknown variable namespace {self.ns!r}")
        if self.index < 1:
            raise FormulaError("variable indices start at 1")

    def __str__(self) -> str:
        return f"{self.ns}{self.index}"


def x(i: int) -> Var:
    return Var(X, i)


def z(i: int) -> Var:
    return Var(Z, i)


@dataclass(frozen=True, slots=True)
class Zero:
    pass


@dataclass(frozen=True, slots=True)
class Succ:
    t: "Term"


@dataclass(frozen=True, slots=True)
class Add:
    t1: "Term"
    t2: "Term"


@dataclass(frozen=True, slots=True)
class Mul:
    t1: "Term"
    t2: "Term"


Term = Union[Zero, Var, Succ, Add, Mul]


@dataclass(frozen=True, slots=True)
class Eq:
    t1: Term
    t2: Term


@dataclass(frozen=True, slots=True)
class Lt:
    t1: Term
    t2: Term


@dataclass(frozen=True, slots=True)
class InI:
    t: Term


@dataclass(frozen=True, slots=True)
class Not:
    f: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    f1: "Formula"
    f2: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    f1: "Formula"
    f2: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    f1: "Formula"
    f2: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    f: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    f: "Formula"


@dataclass(frozen=True, slots=True)
class BddExists:
    var: Var
    bound: Term
    f: "Formula"

    def __post_init__(self) -> None:
        if self.var in term_vars(self.bound):
            raise FormulaError(f"bound term mentions its own variable {self.var}")


@dataclass(frozen=True, slots=True)
class BddForall:
    var: Var
    bound: Term
    f: "Formula"

    def __post_init__(self) -> None:
        if self.var in term_vars(self.bound):
            raise FormulaError(f"bound term mentions its own variable {self.var}")


Formula = Union[Eq, Lt, InI, Not, Or, And, Implies, Exists, Forall, BddExists, BddForall]

ATOMS = (Eq, Lt, InI)
BINARY = (Or, And, Implies)
UNBOUNDED = (Exists, Forall)
BOUNDED = (BddExists, BddForall)
QUANTIFIERS = UNBOUNDED + BOUNDED


def term_vars(t: Term) -> frozenset[Var]:
    while isinstance(t, Succ):
        t = t.t
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Zero):
        return frozenset()
    return term_vars(t.t1) | term_vars(t.t2)


def free_vars(f: Formula) -> frozenset[Var]:
    if isinstance(f, (Eq, Lt)):
        return term_vars(f.t1) | term_vars(f.t2)
    if isinstance(f, InI):
        return term_vars(f.t)
    if isinstance(f, Not):
        return free_vars(f.f)
    if isinstance(f, BINARY):
        return free_vars(f.f1) | free_vars(f.f2)
    if isinstance(f, UNBOUNDED):
        return free_vars(f.f) - {f.var}
    if isinstance(f, BOUNDED):
        return term_vars(f.bound) | (free_vars(f.f) - {f.var})
    raise TypeError(f"not a formula: {f!r}")


def sorted_free_vars(f: Formula) -> list[Var]:
    """Free variables in the canonical argument order (x-namespace first)."""
    return sorted(free_vars(f))


def arity(f: Formula) -> int:
    return len(free_vars(f))


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals denote natural numbers")
    t: Term = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


COMPACT_THRESHOLD = 256


def compact_numeral(n: int) -> Term:
    """A closed term denoting n with depth O(log n).

    Plain numerals are used up to ``COMPACT_THRESHOLD``; above it the value
    is built in binary by Horner's rule, ``(2 * rest) + bit``.
    """
    if n <= COMPACT_THRESHOLD:
        return numeral(n)
    two = numeral(2)
    t: Term = numeral(1)
    for bit in bin(n)[3:]:
        t = Mul(two, t)
        if bit == "1":
            t = Succ(t)
    return t


def numeral_value(t: Term) -> int | None:
    """Return n if t is the numeral S^n(0), else None."""
    n = 0
    while isinstance(t, Succ):
        t = t.t
        n += 1
    return n if isinstance(t, Zero) else None


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, ATOMS):
        return ()
    if isinstance(f, Not):
        return (f.f,)
    if isinstance(f, BINARY):
        return (f.f1, f.f2)
    return (f.f,)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, f itself first."""
    yield f
    for c in children(f):
        yield from subformulas(c)


def all_vars(f: Formula) -> frozenset[Var]:
    """Every variable occurring in f, free or bound."""
    out: set[Var] = set()
    for g in subformulas(f):
        if isinstance(g, (Eq, Lt)):
            out |= term_vars(g.t1) | term_vars(g.t2)
        elif isinstance(g, InI):
            out |= term_vars(g.t)
        elif isinstance(g, QUANTIFIERS):
            out.add(g.var)
            if isinstance(g, BOUNDED):
                out |= term_vars(g.bound)
    return frozenset(out)


def uses_predicate(f: Formula) -> bool:
    return any(isinstance(g, InI) for g in subformulas(f))


def is_delta0(f: Formula) -> bool:
    """True iff every quantifier in f is bounded (purely syntactic)."""
    return not any(isinstance(g, UNBOUNDED) for g in subformulas(f))


def is_normalized(f: Formula) -> bool:
    """True iff f only uses Eq/Lt/InI/Not/Or/Exists/BddExists."""
    return not any(isinstance(g, (And, Implies, Forall, BddForall)) for g in subformulas(f))


def exists_depth(f: Formula) -> int:
    """Maximum nesting of unbounded quantifiers."""
    if isinstance(f, ATOMS):
        return 0
    d = max(exists_depth(c) for c in children(f))
    return d + 1 if isinstance(f, UNBOUNDED) else d


def normalize_connectives(f: Formula) -> Formula:
    """Rewrite into the {~, \\/, exists} fragment.

    Bounded existentials are kept as first-class nodes; a bounded universal
    becomes ``~ exists v < t . ~ f``.
    """
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(normalize_connectives(f.f))
    if isinstance(f, Or):
        return Or(normalize_connectives(f.f1), normalize_connectives(f.f2))
    if isinstance(f, And):
        return Not(Or(Not(normalize_connectives(f.f1)), Not(normalize_connectives(f.f2))))
    if isinstance(f, Implies):
        return Or(Not(normalize_connectives(f.f1)), normalize_connectives(f.f2))
    if isinstance(f, Exists):
        return Exists(f.var, normalize_connectives(f.f))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(normalize_connectives(f.f))))
    if isinstance(f, BddExists):
        return BddExists(f.var, f.bound, normalize_connectives(f.f))
    if isinstance(f, BddForall):
        return Not(BddExists(f.var, f.bound, Not(normalize_connectives(f.f))))
    raise TypeError(f"not a formula: {f!r}")


# -- substitution -----------------------------------------------------------


def subst_term(t: Term, mapping: dict[Var, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Zero):
        return t
    if isinstance(t, Succ):
        return Succ(subst_term(t.t, mapping))
    return type(t)(subst_term(t.t1, mapping), subst_term(t.t2, mapping))


def substitute(f: Formula, mapping: dict[Var, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    mapping = {v: t for v, t in mapping.items() if v in free_vars(f)}
    if not mapping:
        return f
    if isinstance(f, (Eq, Lt)):
        return type(f)(subst_term(f.t1, mapping), subst_term(f.t2, mapping))
    if isinstance(f, InI):
        return InI(subst_term(f.t, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.f, mapping))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.f1, mapping), substitute(f.f2, mapping))
    inner = {v: t for v, t in mapping.items() if v != f.var}
    incoming: set[Var] = set()
    for t in inner.values():
        incoming |= term_vars(t)
    var, body = f.var, f.f
    if var in incoming:
        avoid = incoming | all_vars(body) | set(inner)
        fresh = fresh_x(avoid)
        body = substitute(body, {var: fresh})
        var = fresh
    body = substitute(body, inner)
    if isinstance(f, BOUNDED):
        return type(f)(var, subst_term(f.bound, mapping), body)
    return type(f)(var, body)


def fresh_x(avoid: set[Var] | frozenset[Var]) -> Var:
    i = 1
    while Var(X, i) in avoid:
        i += 1
    return Var(X, i)


# -- builders ---------------------------------------------------------------


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for g in fs[1:]:
        out = And(out, g)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[0]
    for g in fs[1:]:
        out = Or(out, g)
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def forall_many(vs: list[Var], body: Formula) -> Formula:
    for v in reversed(vs):
        body = Forall(v, body)
    return body


def increasing(vs: list[Var]) -> Formula | None:
    """The chain v1 < v2 < ... < vn, or None for fewer than two variables."""
    links = [Lt(a, b) for a, b in zip(vs, vs[1:])]
    return conj(*links) if links else None
