"""Indiscernibility schemes over finite structures ([0, N], I).

Each scheme exists twice: as an emitted L_A(I) sentence (checked with
``check_scheme``, i.e. the generic evaluator) and as a direct tuple loop
(``check_indis``, ``check_apart``, ``check_indis_plus``).  The two routes must
agree; the test-suite cross-checks them.

The miners build finite witnesses: Ramsey thinning over the formula family,
then an ordered extraction of I, optionally with the diagonal and apartness
refinements.  A witness is always re-checked before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Iterable, Literal, Sequence

from .coding import CodingPolicy, goedel_encode
from .errors import (
    DomainError, FormulaError, GuardUnreachable, InsufficientRamseyRoom, StructureError,
)
from .evaluator import eval_over_expansion, tuple_predicate, witness_finder
from .grammar import parse_formula, render
from .parallel import pmap
from .ramsey import ramsey_monochromatic
from .star import prenex_parts
from .syntax import (
    BddExists, BddForall, Exists, Forall, Formula, Implies, InI, Lt, Not, Var, X,
    all_vars, compact_numeral, conj, free_vars, iff, increasing,
    normalize_connectives, subformulas, substitute,
)

Guard = Literal["relaxed", "strict"]

DEFAULT_POOL = 400
# thinning for arity >= 3 is cubic in the candidate count; it sees this many
HIGH_ARITY_POOL = 128
UNBOUNDED_FRACTION = 0.9


# -- emitters ----------------------------------------------------------------------


def _fresh_block(f: Formula, count: int, taken: set[Var] | None = None) -> list[Var]:
    used = {v.index for v in all_vars(f) if v.ns == X} | {v.index for v in (taken or ()) if v.ns == X}
    start = max(used, default=0) + 1
    return [Var(X, start + s) for s in range(count)]


def _forall_in_I(vs: Sequence[Var], body: Formula) -> Formula:
    for v in reversed(vs):
        body = Forall(v, Implies(InI(v), body))
    return body


def _arity_check(f: Formula, n: int | None) -> list[Var]:
    vs = sorted(free_vars(f))
    if n is not None and n != len(vs):
        raise FormulaError(f"formula has {len(vs)} free variables, arity {n} requested")
    if not vs:
        raise FormulaError("indiscernibility needs at least one free variable")
    return vs


def _indis_body(f: Formula, vs: list[Var], xs: list[Var], ys: list[Var], guard=None) -> Formula:
    parts = [c for c in (increasing(xs), increasing(ys)) if c is not None]
    if guard is not None:
        parts += [Lt(guard, xs[0]), Lt(guard, ys[0])]
    same = iff(substitute(f, dict(zip(vs, xs))), substitute(f, dict(zip(vs, ys))))
    return Implies(conj(*parts), same) if parts else same


def emit_indis_sentence(f: Formula, n: int | None = None) -> Formula:
    """forall x1..xn in I, y1..yn in I: increasing tuples agree on f."""
    vs = _arity_check(f, n)
    fresh = _fresh_block(f, 2 * len(vs))
    xs, ys = fresh[: len(vs)], fresh[len(vs):]
    return _forall_in_I(xs + ys, _indis_body(f, vs, xs, ys))


def emit_indis_circ_sentence(
    f: Formula, n: int | None = None, coding: CodingPolicy = goedel_encode
) -> Formula:
    """The guarded variant: only tuples starting above the code of f count."""
    vs = _arity_check(f, n)
    fresh = _fresh_block(f, 2 * len(vs))
    xs, ys = fresh[: len(vs)], fresh[len(vs):]
    guard = compact_numeral(coding(f))
    return _forall_in_I(xs + ys, _indis_body(f, vs, xs, ys, guard))


def _split_apart(f: Formula, witness_var: Var | None) -> tuple[list[Var], Var]:
    vs = sorted(free_vars(f))
    if not vs:
        raise FormulaError("apartness needs a witness variable")
    y = vs[-1] if witness_var is None else witness_var
    if y not in vs:
        raise FormulaError(f"{y} is not free in the formula")
    return [v for v in vs if v != y], y


def emit_apart_sentence(f: Formula, witness_var: Var | None = None) -> Formula:
    """forall i, j in I [i < j -> forall x < i (exists y f -> exists y < j f)]."""
    params, y = _split_apart(f, witness_var)
    i, j = _fresh_block(f, 2)
    inner = Implies(Exists(y, f), BddExists(y, j, f))
    for p in reversed(params):
        inner = BddForall(p, i, inner)
    return _forall_in_I([i, j], Implies(Lt(i, j), inner))


def _split_plus(f: Formula, r: int) -> tuple[list[Var], Var, list[Var]]:
    vs = sorted(free_vars(f))
    if r < 1:
        raise FormulaError("diagonal indiscernibility needs r >= 1")
    if len(vs) < r + 1:
        raise FormulaError(f"formula has {len(vs)} free variables; need at least {r + 1}")
    n = len(vs) - 1 - r
    return vs[:n], vs[n], vs[n + 1:]


def emit_indis_plus_sentence(f: Formula, n: int | None = None, r: int = 1) -> Formula:
    """Diagonal indiscernibility: above a pivot i, parameters below i cannot
    tell increasing r-tuples apart."""
    params, pivot, tail = _split_plus(f, r)
    if n is not None and n != len(params):
        raise FormulaError(f"formula splits as n={len(params)}, r={r}; n={n} requested")
    fresh = _fresh_block(f, 1 + 2 * r)
    i, js, ks = fresh[0], fresh[1: 1 + r], fresh[1 + r:]
    lhs = substitute(f, {pivot: i, **dict(zip(tail, js))})
    rhs = substitute(f, {pivot: i, **dict(zip(tail, ks))})
    inner: Formula = iff(lhs, rhs)
    for p in reversed(params):
        inner = BddForall(p, i, inner)
    cond = [c for c in (increasing(js), increasing(ks)) if c is not None]
    cond += [Lt(i, js[0]), Lt(i, ks[0])]
    return _forall_in_I([i] + js + ks, Implies(conj(*cond), inner))


def emit_indis_theta_sentence(f: Formula, theta: Formula) -> Formula:
    """Indiscernibility for the class defined by the unary formula theta (plain L_A)."""
    vs = _arity_check(f, None)
    tv = sorted(free_vars(theta))
    if len(tv) != 1:
        raise FormulaError("theta must have exactly one free variable")
    n = len(vs)
    fresh = _fresh_block(f, 2 * n, set(all_vars(theta)))
    xs, ys = fresh[:n], fresh[n:]
    parts = [c for c in (increasing(xs), increasing(ys)) if c is not None]
    parts += [substitute(theta, {tv[0]: w}) for w in xs + ys]
    body = Implies(conj(*parts), iff(substitute(f, dict(zip(vs, xs))), substitute(f, dict(zip(vs, ys)))))
    for w in reversed(xs + ys):
        body = Forall(w, body)
    return body


def check_scheme(sentence: Formula, I: Iterable[int], N: int) -> bool:
    if free_vars(sentence):
        raise FormulaError("scheme sentences must be closed")
    return eval_over_expansion(sentence, {}, I, N)


# -- direct checkers -----------------------------------------------------------------


def _validate(I: Iterable[int], N: int) -> list[int]:
    out = sorted(set(I))
    if out and (out[0] < 0 or out[-1] > N):
        raise StructureError(f"I is not a subset of [0, {N}]")
    return out


def check_indis(f: Formula, I: Iterable[int], N: int, guard_code: int | None = None) -> bool:
    """All increasing n-tuples from I (above ``guard_code`` if given) agree on f."""
    elems = _validate(I, N)
    vs = sorted(free_vars(f))
    if not vs:
        return True
    if guard_code is not None:
        elems = [e for e in elems if e > guard_code]
    pred = tuple_predicate(f, vs, N)
    seen: set[bool] = set()
    for t in combinations(elems, len(vs)):
        seen.add(pred(t))
        if len(seen) > 1:
            return False
    return True


@dataclass(frozen=True)
class ApartFailure:
    i: int
    j: int
    params: tuple[int, ...]
    witness: int


def apart_failure(
    f: Formula, I: Iterable[int], N: int, witness_var: Var | None = None
) -> ApartFailure | None:
    """First violation of apartness, or None.

    For each i in I only the next element j matters: witnesses must stay
    below it for every parameter tuple under i.
    """
    elems = _validate(I, N)
    params, y = _split_apart(f, witness_var)
    find = witness_finder(f, y, params, N + 1)
    n = len(params)
    prev = 0
    worst: tuple[int, tuple[int, ...]] = (-1, ())
    for i, j in zip(elems, elems[1:]):
        if n == 0:
            new = [()] if prev == 0 else []
        else:
            new = [t for t in product(range(i), repeat=n) if max(t) >= prev]
        for t, w in zip(new, pmap(find, new)):
            if w is not None and w > worst[0]:
                worst = (w, t)
        prev = max(prev, i) if n else 1
        if worst[0] >= j:
            return ApartFailure(i, j, worst[1], worst[0])
    return None


def check_apart(f: Formula, I: Iterable[int], N: int, witness_var: Var | None = None) -> bool:
    return apart_failure(f, I, N, witness_var) is None


def _plus_signature(pred, params_n: int, i: int, tail: tuple[int, ...]) -> tuple[bool, ...]:
    return tuple(pred(xs + (i,) + tail) for xs in product(range(i), repeat=params_n))


def check_indis_plus(
    f: Formula, I: Iterable[int], N: int, r: int = 1, pivots: int | None = None
) -> bool:
    """Diagonal indiscernibility; ``pivots`` limits the check to the first pivots."""
    elems = _validate(I, N)
    params, pivot, tail = _split_plus(f, r)
    pred = tuple_predicate(f, params + [pivot] + tail, N)
    for idx, i in enumerate(elems):
        if pivots is not None and idx >= pivots:
            break
        above = [e for e in elems if e > i]
        sigs = {_plus_signature(pred, len(params), i, t) for t in combinations(above, r)}
        if len(sigs) > 1:
            return False
    return True


# -- families ----------------------------------------------------------------------------


def apartness_family(formulas: Iterable[Formula]) -> list[tuple[Formula, Var]]:
    """(matrix, witness variable) for every unbounded quantifier that matters.

    Covers the normalized form (what ``star`` bounds) and the prenex form
    (what ``star_pnf`` bounds); a universal contributes its negated matrix.
    """
    out: list[tuple[Formula, Var]] = []
    seen: set[tuple[Formula, Var]] = set()

    def add(matrix: Formula, v: Var) -> None:
        if v in free_vars(matrix) and (matrix, v) not in seen:
            seen.add((matrix, v))
            out.append((matrix, v))

    for f in formulas:
        for g in subformulas(normalize_connectives(f)):
            if isinstance(g, Exists):
                add(g.f, g.var)
        prefix, matrix = prenex_parts(f)
        for s, (q, v) in enumerate(prefix):
            rest = matrix
            for q2, v2 in reversed(prefix[s + 1:]):
                rest = q2(v2, rest)
            add(normalize_connectives(rest if q is Exists else Not(rest)), v)
    return out


# -- witnesses ------------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    scheme: str
    index: int
    formula: str
    passed: bool

    def to_json(self) -> dict:
        return {"scheme": self.scheme, "index": self.index, "formula": self.formula, "pass": self.passed}


@dataclass(frozen=True)
class IndiscernibleWitness:
    I: tuple[int, ...]
    family: tuple[Formula, ...]
    N: int
    guard: Guard = "relaxed"
    diagonal: bool = False
    r: int = 1
    param_bound: int | None = None
    apart_family: tuple[tuple[Formula, Var], ...] = ()
    checks: tuple[CheckRecord, ...] = ()
    h_sizes: tuple[int, ...] = ()
    construction: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        if len(self.I) < 2 or list(self.I) != sorted(set(self.I)):
            raise StructureError("I must be strictly increasing with at least two elements")
        if self.I[0] < 0 or self.I[-1] > self.N:
            raise StructureError(f"I is not a subset of [0, {self.N}]")

    @property
    def unbounded(self) -> bool:
        """Finite stand-in for 'I is unbounded': I reaches the top decile of [0, N]."""
        return self.I[-1] >= UNBOUNDED_FRACTION * self.N

    def passed(self, scheme: str, index: int) -> bool | None:
        for c in self.checks:
            if c.scheme == scheme and c.index == index:
                return c.passed
        return None

    def apart_ok(self) -> bool:
        return all(c.passed for c in self.checks if c.scheme == "apart")

    def to_json(self) -> dict:
        return {
            "I": list(self.I),
            "family": [render(f) for f in self.family],
            "N": self.N,
            "guard": self.guard,
            "diagonal": self.diagonal,
            "r": self.r,
            "param_bound": self.param_bound,
            "apart_family": [{"formula": render(f), "var": str(v)} for f, v in self.apart_family],
            "checks": [c.to_json() for c in self.checks],
            "unbounded": {"max": self.I[-1], "threshold": UNBOUNDED_FRACTION * self.N,
                          "reached": self.unbounded},
            "trace": {
                "H_sizes": list(self.h_sizes),
                "construction": [{"n": n, "i": i, "guard": g} for n, i, g in self.construction],
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "IndiscernibleWitness":
        def var(s: str) -> Var:
            return Var(s[0], int(s[1:]))

        return cls(
            I=tuple(data["I"]),
            family=tuple(parse_formula(s) for s in data["family"]),
            N=data["N"],
            guard=data.get("guard", "relaxed"),
            diagonal=data.get("diagonal", False),
            r=data.get("r", 1),
            param_bound=data.get("param_bound"),
            apart_family=tuple(
                (parse_formula(a["formula"]), var(a["var"])) for a in data.get("apart_family", [])
            ),
            checks=tuple(
                CheckRecord(c["scheme"], c["index"], c["formula"], c["pass"])
                for c in data.get("checks", [])
            ),
            h_sizes=tuple(data.get("trace", {}).get("H_sizes", [])),
            construction=tuple(
                (c["n"], c["i"], c["guard"]) for c in data.get("trace", {}).get("construction", [])
            ),
        )

    def with_I(self, I: Sequence[int]) -> "IndiscernibleWitness":
        """Same family and settings on another set, with the checks recomputed."""
        w = replace(self, I=tuple(I), checks=(), construction=())
        return replace(w, checks=tuple(run_checks(w)))

    def tail(self, c: int) -> "IndiscernibleWitness":
        """The witness restricted to elements above c."""
        return self.with_I([i for i in self.I if i > c])


def run_checks(
    w: IndiscernibleWitness, coding: CodingPolicy = goedel_encode
) -> list[CheckRecord]:
    out = []
    for idx, f in enumerate(w.family):
        if w.guard == "strict":
            ok = check_indis(f, w.I, w.N, guard_code=coding(f))
            out.append(CheckRecord("indis_circ", idx, render(f), ok))
        else:
            out.append(CheckRecord("indis", idx, render(f), check_indis(f, w.I, w.N)))
    if w.diagonal:
        for idx, f in enumerate(w.family):
            if len(free_vars(f)) >= w.r + 1:
                ok = check_indis_plus(f, w.I, w.N, w.r)
                out.append(CheckRecord("indis_plus", idx, render(f), ok))
    for idx, (f, v) in enumerate(w.apart_family):
        out.append(CheckRecord("apart", idx, f"{v} : {render(f)}", check_apart(f, w.I, w.N, v)))
    return out


# -- miners ----------------------------------------------------------------------------------


def _pool(N: int, pool: int | None) -> list[int]:
    size = min(N + 1, DEFAULT_POOL if pool is None else pool)
    return list(range(size))


def _guard_codes(family: Sequence[Formula], N: int, guard: Guard, coding: CodingPolicy) -> list[int]:
    if guard == "relaxed":
        return []
    if guard != "strict":
        raise ValueError(f"unknown guard mode {guard!r}")
    codes = [coding(f) for f in family]
    too_big = [c for c in codes if c > N]
    if too_big:
        raise GuardUnreachable(
            f"formula code {min(too_big)} exceeds the domain bound {N}; use the relaxed guard"
        )
    return codes


def _floor(n: int, codes: Sequence[int]) -> int:
    """Elements chosen at step n must exceed this value.

    i_0 >= code(f_0) and i_{n+1} > code(f_n); no guard in relaxed mode.
    """
    if n == 0:
        return codes[0] - 1 if codes else -1
    return codes[n - 1] if n - 1 < len(codes) else -1


def _thin(family: Sequence[Formula], N: int, candidates: list[int], m: int) -> tuple[list[int], list[int]]:
    """H_0 >= H_1 >= ...: each stage homogeneous for one more family member."""
    h = list(candidates)
    sizes = [len(h)]
    for f in family:
        vs = sorted(free_vars(f))
        if vs:
            pred = tuple_predicate(f, vs, N)
            if len(vs) >= 3:
                h = h[:HIGH_ARITY_POOL]
            h = ramsey_monochromatic(h, len(vs), pred, max(m, len(vs)), truncate=False)
        sizes.append(len(h))
    return h, sizes


def mine_indiscernibles(
    family: Sequence[Formula],
    N: int,
    m: int,
    guard: Guard = "relaxed",
    *,
    pool: int | None = None,
    coding: CodingPolicy = goedel_encode,
) -> IndiscernibleWitness:
    if m < 2 or N < m:
        raise DomainError("need N >= m >= 2")
    family = tuple(family)
    codes = _guard_codes(family, N, guard, coding)
    h, sizes = _thin(family, N, _pool(N, pool), m)
    picked: list[int] = []
    construction = []
    for n in range(m):
        floor = _floor(n, codes)
        above = max(floor, picked[-1] if picked else -1)
        nxt = next((e for e in h if e > above), None)
        if nxt is None:
            raise InsufficientRamseyRoom(f"extraction stopped at {len(picked)} < {m}", picked)
        picked.append(nxt)
        construction.append((n, nxt, floor + 1 if n == 0 else floor))
    w = IndiscernibleWitness(
        I=tuple(picked), family=family, N=N, guard=guard, h_sizes=tuple(sizes),
        construction=tuple(construction),
    )
    w = replace(w, checks=tuple(run_checks(w, coding)))
    _require(w, ("indis", "indis_circ"))
    return w


def _require(w: IndiscernibleWitness, schemes: tuple[str, ...]) -> None:
    bad = [c for c in w.checks if c.scheme in schemes and not c.passed]
    if bad:
        raise DomainError(f"post-verification failed: {bad[0].scheme} for {bad[0].formula}")


def mine_diagonal(
    family: Sequence[Formula],
    N: int,
    m: int,
    param_bound: int | None = None,
    guard: Guard = "relaxed",
    *,
    r: int = 1,
    pool: int | None = None,
    apart: Sequence[tuple[Formula, Var]] | None = None,
    coding: CodingPolicy = goedel_encode,
) -> IndiscernibleWitness:
    """Indiscernibles refined for diagonal indiscernibility and apartness.

    After thinning, elements are taken in increasing order.  Each new element
    p acts as a pivot: the remaining candidates are split by the pattern
    ``{x < p : f(x, p, y)}`` for every diagonal family member (keeping the
    largest class), and by the bounded-witness pattern
    ``{x < p : exists y' < y . g(x, y')}`` for every apartness matrix g
    (keeping the class that already shows every witness that exists in
    [0, N]).  Pivots after the ``param_bound``-th are not used for the diagonal
    split; the resulting checks then report partial coverage.
    """
    if m < 2 or N < m:
        raise DomainError("need N >= m >= 2")
    family = tuple(family)
    codes = _guard_codes(family, N, guard, coding)
    apart_fam = tuple(apartness_family(family) if apart is None else apart)
    h, sizes = _thin(family, N, _pool(N, pool), m)

    diag = []
    for f in family:
        if len(free_vars(f)) >= r + 1:
            params, pivot, tail = _split_plus(f, r)
            diag.append((len(params), tuple_predicate(f, params + [pivot] + tail, N)))
    finders = []
    for f, v in apart_fam:
        params, y = _split_apart(f, v)
        finders.append((len(params), witness_finder(f, y, params, N + 1)))
    reach = [(-1, 0)] * len(finders)  # (max witness so far, params covered below)

    chosen: list[int] = []
    construction = []
    rest = list(h)
    while len(chosen) < m:
        n = len(chosen)
        floor = _floor(n, codes)
        rest = [e for e in rest if e > floor]
        if not rest:
            raise InsufficientRamseyRoom(f"diagonal refinement stopped at {n} < {m}", chosen)
        p = rest.pop(0)
        chosen.append(p)
        construction.append((n, p, floor + 1 if n == 0 else floor))
        if len(chosen) == m:
            break
        for idx, (k, find) in enumerate(finders):
            worst, covered = reach[idx]
            if k == 0:
                new = [()] if covered == 0 else []
            else:
                new = [t for t in product(range(p), repeat=k) if max(t) >= covered]
            for w in pmap(find, new):
                if w is not None and w > worst:
                    worst = w
            reach[idx] = (worst, max(covered, p) if k else 1)
            rest = [e for e in rest if e > worst]
        if param_bound is None or len(chosen) <= param_bound:
            for k, pred in diag:
                if len(rest) < r:
                    break
                if r == 1:
                    keys = pmap(lambda y: _plus_signature(pred, k, p, (y,)), rest)
                    groups: dict = {}
                    for y, key in zip(rest, keys):
                        groups.setdefault(key, []).append(y)
                    best = min(groups, key=lambda g: (-len(groups[g]), g))
                    rest = groups[best]
                else:
                    sig = lambda t, pred=pred, k=k: _plus_signature(pred, k, p, t)
                    rest = ramsey_monochromatic(rest, r, sig, r, truncate=False)

    w = IndiscernibleWitness(
        I=tuple(chosen), family=family, N=N, guard=guard, diagonal=True, r=r,
        param_bound=param_bound, apart_family=apart_fam, h_sizes=tuple(sizes),
        construction=tuple(construction),
    )
    w = replace(w, checks=tuple(run_checks(w, coding)))
    _require(w, ("indis", "indis_circ"))
    return w
