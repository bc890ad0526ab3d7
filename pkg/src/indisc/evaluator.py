"""Truth evaluation over initial segments of the natural numbers.

Three entry points share one compiler:

* ``eval_delta0``   exact truth of a bounded formula in N;
* ``eval_budgeted`` Kleene three-valued truth where an unbounded ``exists``
  searches [0, W] and reports UNKNOWN when no witness turns up;
* ``eval_over_expansion`` truth in the finite structure ([0, N], I) with
  unbounded quantifiers ranging over [0, N].

Formulas are compiled once into nested closures (cached per formula).  Before
looping over a quantified variable the compiler derives, where it can, a
syntactic restriction on the values for which the body can possibly have the
deciding truth value (``y + y = x`` forces ``y <= x``; ``I(y) -> ...`` forces
``y`` into I).  Values outside the restriction are skipped; this never
changes a result, only the running time.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NotDelta0Error, StructureError, UnboundVariableError
from .syntax import (
    Add, And, BddExists, BddForall, Eq, Exists, Formula, Implies, InI,
    Lt, Not, Or, Succ, Term, Var, Zero, free_vars, is_delta0, numeral_value,
    subformulas, substitute, term_vars,
)

Assignment = Mapping[Var, int]


class Verdict3(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool | None) -> "Verdict3":
        if value is None:
            return cls.UNKNOWN
        return cls.TRUE if value else cls.FALSE

    def __invert__(self) -> "Verdict3":
        return {Verdict3.TRUE: Verdict3.FALSE, Verdict3.FALSE: Verdict3.TRUE}.get(
            self, Verdict3.UNKNOWN
        )


class _Ctx:
    """Per-call evaluation parameters."""

    __slots__ = ("limit", "clamp", "members", "ordered")

    def __init__(self, limit: int | None, clamp: int | None,
                 members: frozenset[int] = frozenset()):
        self.limit = limit  # exclusive range of unbounded quantifiers
        self.clamp = clamp  # cap applied to bounded-quantifier bounds
        self.members = members
        self.ordered = sorted(members)


# -- terms -----------------------------------------------------------------


def _compile_term(t: Term) -> Callable[[dict], int]:
    n = numeral_value(t)
    if n is not None:
        return lambda env: n
    depth = 0
    while isinstance(t, Succ):
        t = t.t
        depth += 1
    if depth:
        inner = _compile_term(t)
        return lambda env: inner(env) + depth
    if isinstance(t, Var):
        return lambda env: env[t]
    a, b = _compile_term(t.t1), _compile_term(t.t2)
    if isinstance(t, Add):
        return lambda env: a(env) + b(env)
    return lambda env: a(env) * b(env)


def eval_term(t: Term, a: Assignment) -> int:
    missing = term_vars(t) - set(a)
    if missing:
        raise UnboundVariableError(f"unbound variables: {', '.join(map(str, sorted(missing)))}")
    return _compile_term(t)(dict(a))


# -- search-range restriction ----------------------------------------------
#
# A restriction is None (no information) or a tuple tree:
#   ("lt", term_fn)  value < term
#   ("ge", term_fn)  value >= term
#   ("in",)          value in I
#   ("unless", fn, r) r applies unless the v-free condition fn(env, ctx) holds
#   ("and", r1, r2) / ("or", r1, r2)


def _dominates(t: Term, v: Var) -> bool:
    """The value of t is at least the value of v, whatever the other variables are."""
    if t == v:
        return True
    if isinstance(t, Succ):
        return _dominates(t.t, v)
    if isinstance(t, Add):
        return _dominates(t.t1, v) or _dominates(t.t2, v)
    return False


def _restrict(
    f: Formula, v: Var, positive: bool, banned: frozenset = frozenset(), conditional: bool = True
):
    """Restriction on v that holds whenever f evaluates to ``positive``.

    Bounds never mention a variable in ``banned`` (quantified further out
    than the point of use).  ``conditional`` allows "unless" nodes, whose
    condition is evaluated two-valued.
    """
    if v not in free_vars(f):
        return None
    if isinstance(f, (Eq, Lt)) and any(
        w in banned for w in term_vars(f.t1) | term_vars(f.t2)
    ):
        return None
    if isinstance(f, Lt):
        lo, hi = (f.t1, f.t2) if positive else (f.t2, f.t1)
        if _dominates(lo, v) and v not in term_vars(hi):
            # positive: v <= lo < hi ; negative: v <= lo' <= hi'  (t2 <= t1)
            return ("lt", _compile_term(hi if positive else Succ(hi)))
        if hi == v and v not in term_vars(lo):
            # positive: lo < v ; negative: lo' <= v
            return ("ge", _compile_term(Succ(lo) if positive else lo))
        return None
    if isinstance(f, Eq):
        if not positive:
            return None
        for lo, hi in ((f.t1, f.t2), (f.t2, f.t1)):
            if _dominates(lo, v) and v not in term_vars(hi):
                up = ("lt", _compile_term(Succ(hi)))
                return ("and", ("ge", _compile_term(hi)), up) if lo == v else up
        return None
    if isinstance(f, InI):
        return ("in",) if positive and f.t == v else None
    if isinstance(f, Not):
        return _restrict(f.f, v, not positive, banned, conditional)
    if isinstance(f, Implies):
        return _restrict(Or(Not(f.f1), f.f2), v, positive, banned, conditional)
    if isinstance(f, (Exists, BddExists)) and positive:
        # some instance of the body holds; keep bounds free of the bound variable
        return _restrict(f.f, v, True, banned | {f.var}, conditional)
    if isinstance(f, Exists):
        # every instance fails, in particular the one at 0
        return _restrict(substitute(f.f, {f.var: Zero()}), v, False, banned, conditional)
    if isinstance(f, (And, Or)):
        meet = isinstance(f, And) == positive
        r1 = _restrict(f.f1, v, positive, banned, conditional)
        r2 = _restrict(f.f2, v, positive, banned, conditional)
        if meet:
            if r1 is None:
                return r2
            if r2 is None:
                return r1
            return ("and", r1, r2)
        if r1 is not None and r2 is not None:
            return ("or", r1, r2)
        # one side does not mention v: it either settles f for every value or
        # leaves the other side's restriction in force
        for side, other in ((f.f1, r2), (f.f2, r1)):
            if (conditional and other is not None and v not in free_vars(side)
                    and not free_vars(side) & banned):
                cond = side if positive else Not(side)
                return ("unless", _compile2(cond), other)
        return None
    return None


def _apply_restriction(r, env, ctx) -> tuple[int, int | None, bool]:
    """(lower bound, upper bound or None, must be in I)."""
    kind = r[0]
    if kind == "unless":
        return (0, None, False) if r[1](env, ctx) else _apply_restriction(r[2], env, ctx)
    if kind == "lt":
        return 0, r[1](env), False
    if kind == "ge":
        return r[1](env), None, False
    if kind == "in":
        return 0, None, True
    (l1, b1, i1), (l2, b2, i2) = _apply_restriction(r[1], env, ctx), _apply_restriction(r[2], env, ctx)
    if kind == "and":
        bound = b1 if b2 is None else b2 if b1 is None else min(b1, b2)
        return max(l1, l2), bound, i1 or i2
    bound = None if b1 is None or b2 is None else max(b1, b2)
    return min(l1, l2), bound, i1 and i2


def _values(ctx: _Ctx, upper: int | None, r, env) -> Iterable[int]:
    """Candidate values in [0, upper) allowed by restriction r, in increasing order."""
    in_i = False
    lower = 0
    if r is not None:
        lower, bound, in_i = _apply_restriction(r, env, ctx)
        if bound is not None:
            upper = bound if upper is None else min(upper, bound)
    if upper is None:
        raise NotDelta0Error("unbounded search without a domain limit")
    if upper <= lower:
        return ()
    if in_i:
        return ctx.ordered[bisect_left(ctx.ordered, lower): bisect_left(ctx.ordered, upper)]
    return range(lower, upper)


# -- two-valued compiler -----------------------------------------------------


@lru_cache(maxsize=4096)
def _compile2(f: Formula) -> Callable[[dict, _Ctx], bool]:
    if isinstance(f, (Eq, Lt)):
        a, b = _compile_term(f.t1), _compile_term(f.t2)
        if isinstance(f, Eq):
            return lambda env, ctx: a(env) == b(env)
        return lambda env, ctx: a(env) < b(env)
    if isinstance(f, InI):
        t = _compile_term(f.t)
        return lambda env, ctx: t(env) in ctx.members
    if isinstance(f, Not):
        g = _compile2(f.f)
        return lambda env, ctx: not g(env, ctx)
    if isinstance(f, Or):
        g, h = _compile2(f.f1), _compile2(f.f2)
        return lambda env, ctx: g(env, ctx) or h(env, ctx)
    if isinstance(f, And):
        g, h = _compile2(f.f1), _compile2(f.f2)
        return lambda env, ctx: g(env, ctx) and h(env, ctx)
    if isinstance(f, Implies):
        g, h = _compile2(f.f1), _compile2(f.f2)
        return lambda env, ctx: (not g(env, ctx)) or h(env, ctx)

    v = f.var
    body = _compile2(f.f)
    existential = isinstance(f, (Exists, BddExists))
    # exists: body true  => restriction ; forall: body false => restriction
    r = _restrict(f.f, v, existential)
    bound = _compile_term(f.bound) if isinstance(f, (BddExists, BddForall)) else None

    if v not in free_vars(f.f):
        # vacuous: one look at the body decides, unless the range is empty
        def vacuous(env, ctx):
            upper = ctx.limit if bound is None else bound(env)
            if upper is None:
                raise NotDelta0Error("unbounded search without a domain limit")
            return body(env, ctx) if upper > 0 else not existential

        return vacuous

    def run(env, ctx):
        if bound is None:
            upper = ctx.limit
        else:
            upper = bound(env)
            if ctx.clamp is not None and upper > ctx.clamp:
                upper = ctx.clamp
        saved = env.get(v, _MISSING)
        try:
            for val in _values(ctx, upper, r, env):
                env[v] = val
                if body(env, ctx) == existential:
                    return existential
            return not existential
        finally:
            if saved is _MISSING:
                env.pop(v, None)
            else:
                env[v] = saved

    return run


_MISSING = object()


# -- three-valued compiler ---------------------------------------------------


@lru_cache(maxsize=4096)
def _compile3(f: Formula) -> Callable[[dict, _Ctx], bool | None]:
    if isinstance(f, (Eq, Lt, InI)):
        g = _compile2(f)
        return g
    if isinstance(f, Not):
        g = _compile3(f.f)

        def neg(env, ctx):
            val = g(env, ctx)
            return None if val is None else not val

        return neg
    if isinstance(f, (Or, And, Implies)):
        g, h = _compile3(f.f1), _compile3(f.f2)
        if isinstance(f, Implies):
            g = _compile3(Not(f.f1))
        conj = isinstance(f, And)

        def binop(env, ctx):
            a = g(env, ctx)
            if a is (not conj):
                return a
            b = h(env, ctx)
            if b is (not conj):
                return b
            if a is None or b is None:
                return None
            return conj

        return binop

    v = f.var
    body = _compile3(f.f)
    existential = isinstance(f, (Exists, BddExists))
    r = _restrict(f.f, v, existential, conditional=False)
    bounded = isinstance(f, (BddExists, BddForall))
    bound = _compile_term(f.bound) if bounded else None

    if v not in free_vars(f.f):
        def vacuous(env, ctx):
            if bounded and bound(env) <= 0:
                return not existential
            out = body(env, ctx)
            if out is None or bounded or out == existential:
                return out
            return None  # unbounded and undecided by the single instance

        return vacuous

    def run(env, ctx):
        # unbounded: search [0, W]; failing to decide leaves the answer open
        upper = bound(env) if bounded else ctx.limit
        saved = env.get(v, _MISSING)
        unknown = not bounded
        try:
            for val in _values(ctx, upper, r, env):
                env[v] = val
                out = body(env, ctx)
                if out is None:
                    unknown = True
                elif out == existential:
                    return existential
            return None if unknown else (not existential)
        finally:
            if saved is _MISSING:
                env.pop(v, None)
            else:
                env[v] = saved

    return run


# -- public API ----------------------------------------------------------------


def _env(f: Formula, a: Assignment) -> dict:
    missing = free_vars(f) - set(a)
    if missing:
        raise UnboundVariableError(
            f"assignment misses {', '.join(map(str, sorted(missing)))}"
        )
    env = dict(a)
    for val in env.values():
        if val < 0:
            raise ValueError("assignments take natural-number values")
    return env


def eval_delta0(f: Formula, a: Assignment) -> bool:
    """Exact truth in N of a bounded formula (the Sat_Delta0 role)."""
    if not is_delta0(f):
        raise NotDelta0Error("formula has an unbounded quantifier")
    if any(isinstance(g, InI) for g in subformulas(f)):
        raise NotDelta0Error("predicate I has no meaning in plain arithmetic")
    return _compile2(f)(_env(f, a), _Ctx(None, None))


def eval_budgeted(f: Formula, a: Assignment, budget: int) -> Verdict3:
    """Three-valued truth; unbounded ``exists`` only looks at [0, budget]."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return Verdict3.of(_compile3(f)(_env(f, a), _Ctx(budget + 1, None)))


def eval_over_expansion(
    f: Formula, a: Assignment, I: Iterable[int], N: int
) -> bool:
    """Truth in ([0, N], +, *, S, <, 0, I); quantifiers range over [0, N]."""
    members = frozenset(I)
    if any(i < 0 or i > N for i in members):
        raise StructureError(f"I is not a subset of [0, {N}]")
    return _compile2(f)(_env(f, a), _Ctx(N + 1, N + 1, members))


def least_witness(f: Formula, v: Var, a: Assignment, limit: int) -> int | None:
    """Least b < limit with f(a, v := b) true; quantifiers in f range over [0, limit)."""
    params = sorted(free_vars(f) - {v})
    _env(f, {**a, v: 0})
    return witness_finder(f, v, params, limit)([a[p] for p in params])


def assignment_for(f: Formula, values: Sequence[int]) -> dict[Var, int]:
    """Map a tuple onto f's free variables in canonical order."""
    vs = sorted(free_vars(f))
    if len(vs) != len(values):
        raise ValueError(f"formula has {len(vs)} free variables, got {len(values)} values")
    return dict(zip(vs, values))



def tuple_predicate(
    f: Formula, variables: Sequence[Var], N: int | None = None, I: Iterable[int] = ()
) -> Callable[[Sequence[int]], bool]:
    """Fast repeated evaluation of f on tuples bound to ``variables``.

    With N given, unbounded quantifiers range over [0, N] as in
    eval_over_expansion; otherwise f must be Delta0.
    """
    missing = free_vars(f) - set(variables)
    if missing:
        raise UnboundVariableError(f"tuple misses {', '.join(map(str, sorted(missing)))}")
    if N is None and not is_delta0(f):
        raise NotDelta0Error("formula has an unbounded quantifier")
    body = _compile2(f)
    ctx = _Ctx(None, None, frozenset(I)) if N is None else _Ctx(N + 1, N + 1, frozenset(I))
    variables = tuple(variables)

    def pred(values: Sequence[int]) -> bool:
        return body(dict(zip(variables, values)), ctx)

    return pred


def witness_finder(
    f: Formula, v: Var, params: Sequence[Var], limit: int
) -> Callable[[Sequence[int]], int | None]:
    """Least b < limit with f(params, v := b) true, as a reusable function.

    Unbounded quantifiers inside f range over [0, limit).
    """
    missing = free_vars(f) - set(params) - {v}
    if missing:
        raise UnboundVariableError(f"unbound: {', '.join(map(str, sorted(missing)))}")
    body = _compile2(f)
    r = _restrict(f, v, True)
    ctx = _Ctx(limit, limit)
    params = tuple(params)

    def find(values: Sequence[int]) -> int | None:
        env = dict(zip(params, values))
        env[v] = 0
        for val in _values(ctx, limit, r, env):
            env[v] = val
            if body(env, ctx):
                return val
        return None

    return find
