"""Formula corpora: seeded random generation, case files, and a fixed family.

A corpus file holds one formula per line.  ``generate_corpus`` writes a
``# arity=.. exists_depth=..`` comment above each formula so the metadata
travels with the file but stays invisible to ``read_corpus``.

Case files (the ``satclass`` input) may attach arguments after a semicolon::

    exists x9 . (x9 < S(x1) /\\ x1 = (x9 + x9)) ; 12
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import FormulaSyntaxError, IExhausted
from .grammar import Language, parse_formula, render
from .indiscernibles import IndiscernibleWitness
from .star import star
from .syntax import (
    Add, And, BddExists, BddForall, Eq, Exists, Forall, Formula, Implies, Lt, Mul, Not, Or,
    Succ, Term, Var, X, Zero, arity, exists_depth, normalize_connectives,
)

FREE_POOL = 3


@dataclass(frozen=True)
class CorpusEntry:
    formula: Formula
    arity: int
    exists_depth: int

    def line(self) -> str:
        return f"# arity={self.arity} exists_depth={self.exists_depth}\n{render(self.formula)}\n"


class _Gen:
    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)
        self.next_bound = FREE_POOL + 1

    def term(self, scope: list[Var], size: int) -> Term:
        r = self.rng.random()
        if size <= 0 or r < 0.45:
            if scope and self.rng.random() < 0.8:
                return self.rng.choice(scope)
            return Zero() if self.rng.random() < 0.5 else Succ(Zero())
        if r < 0.65:
            return Succ(self.term(scope, size - 1))
        cls = Add if r < 0.85 else Mul
        return cls(self.term(scope, size - 1), self.term(scope, size - 1))

    def atom(self, scope: list[Var]) -> Formula:
        cls = Eq if self.rng.random() < 0.5 else Lt
        return cls(self.term(scope, 2), self.term(scope, 2))

    def formula(self, scope: list[Var], qdepth: int, size: int) -> Formula:
        """qdepth is the remaining quantifier nesting allowance."""
        r = self.rng.random()
        if size <= 0 or r < 0.2:
            return self.atom(scope)
        if qdepth > 0 and r < 0.6:
            v = Var(X, self.next_bound)
            self.next_bound += 1
            inner = scope + [v]
            kind = self.rng.choice(("exists", "exists", "forall", "bexists", "bforall"))
            if kind in ("bexists", "bforall"):
                bound = self.term(scope, 1)
                body = self.formula(inner, qdepth, size - 1)
                return (BddExists if kind == "bexists" else BddForall)(v, bound, body)
            body = self.formula(inner, qdepth - 1, size - 1)
            return (Exists if kind == "exists" else Forall)(v, body)
        if r < 0.72:
            return Not(self.formula(scope, qdepth, size - 1))
        cls = self.rng.choice((Or, Or, And, Implies))
        return cls(self.formula(scope, qdepth, size - 1), self.formula(scope, qdepth, size - 1))


def random_formula(rng_seed: int, depth: int, size: int = 5) -> Formula:
    gen = _Gen(rng_seed)
    free = [Var(X, i) for i in range(1, FREE_POOL + 1)]
    return gen.formula(free, depth, size)


def generate_corpus(seed: int, depth: int, count: int, size: int = 5) -> list[CorpusEntry]:
    """``count`` pseudo-random formulas with unbounded-quantifier nesting <= depth.

    Each formula is drawn from its own generator seeded by (seed, index), so a
    prefix of a larger corpus equals the smaller corpus.
    """
    out = []
    for idx in range(count):
        f = random_formula(seed * 1_000_003 + idx, depth, size)
        out.append(CorpusEntry(f, arity(f), exists_depth(normalize_connectives(f))))
    return out


def write_corpus(entries: Sequence[CorpusEntry]) -> str:
    return "".join(e.line() for e in entries)


# -- case files -------------------------------------------------------------------


def read_cases(text: str, language: Language = "LA") -> list[tuple[Formula, tuple[int, ...] | None]]:
    """Lines ``formula`` or ``formula ; a1, a2, ...``; comments and blanks skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        head, _, tail = s.partition(";")
        try:
            f = parse_formula(head.strip(), language)
        except FormulaSyntaxError as e:
            raise FormulaSyntaxError(f"line {lineno}: {e}", e.pos, head) from None
        args = None
        if tail.strip():
            try:
                args = tuple(int(p) for p in tail.split(","))
            except ValueError:
                raise FormulaSyntaxError(f"line {lineno}: arguments must be integers", 0, tail) from None
        out.append((f, args))
    return out


def write_cases(cases: Sequence[tuple[Formula, Sequence[int]]]) -> str:
    return "".join(f"{render(f)} ; {', '.join(map(str, a))}\n" if a else f"{render(f)}\n"
                   for f, a in cases)


def args_room(f: Formula, W: IndiscernibleWitness) -> int:
    """Arguments must stay below this value for the procedure to find its bounds."""
    k = star(normalize_connectives(f)).k
    if len(W.I) < k + 1:
        raise IExhausted(f"witness has {len(W.I)} elements; formula needs {k + 1}")
    return W.I[len(W.I) - 1 - k]


def cases_under_witness(
    family: Sequence[Formula], W: IndiscernibleWitness, count: int, seed: int = 0
) -> list[tuple[Formula, tuple[int, ...]]]:
    """``count`` (formula, arguments) pairs cycling through the family.

    Arguments are drawn below ``args_room`` so that the guard element and
    the k bounding elements all exist.
    """
    rng = random.Random(seed)
    out = []
    for idx in range(count):
        f = family[idx % len(family)]
        room = args_room(f, W)
        out.append((f, tuple(rng.randrange(room) for _ in range(arity(f)))))
    return out


def fill_args(
    cases: Sequence[tuple[Formula, tuple[int, ...] | None]], W: IndiscernibleWitness, seed: int = 0
) -> list[tuple[Formula, tuple[int, ...]]]:
    """Supply deterministic arguments for cases listed without any."""
    rng = random.Random(seed)
    out = []
    for f, a in cases:
        if a is None:
            room = args_room(f, W)
            a = tuple(rng.randrange(room) for _ in range(arity(f)))
        out.append((f, a))
    return out


# -- the fixed small-witness family ------------------------------------------------


# Every unbounded quantifier is guarded by a bound in its parameters, so the
# least witness never exceeds the largest argument plus one and budgeted
# evaluation always decides.
SMALL_WITNESS_FAMILY_TEXT = """\
x1 < x2
exists x9 < x2 . x1 = (x9 + x9)
exists x9 . (x9 < S(x1) /\\ x1 = (x9 + x9))
exists x9 . (x9 < S(x1) /\\ x1 = S((x9 + x9)))
exists x9 . (x9 < S(x1) /\\ x1 = (x9 * x9))
exists x9 . (x9 < S(x2) /\\ (x1 + x9) = x2)
exists x9 . (x9 < S(x2) /\\ (x9 * x1) = x2)
exists x9 . (x1 < x9 /\\ x9 < S(S(x1)))
forall x9 . (x9 < x1 -> exists x8 . (x8 < S(x1) /\\ x9 < x8))
exists x9 . (x9 < S(x1) /\\ (x1 = (x9 + x9) /\\ exists x8 . (x8 < S(x9) /\\ x9 = (x8 + x8))))
exists x9 . (x9 < S(x2) /\\ ~ exists x8 . (x8 < S(x9) /\\ (x8 + x1) = x9))
exists x9 . (x9 < S(x1) /\\ (S(0) < x9 /\\ exists x8 . (x8 < S(x1) /\\ (x9 < x8 /\\ x1 = (x9 * x8)))))
"""


def small_witness_family() -> list[Formula]:
    return [parse_formula(line) for line in SMALL_WITNESS_FAMILY_TEXT.splitlines()]
