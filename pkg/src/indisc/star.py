"""The star transformation: bounding every unbounded quantifier by a fresh z.

``star`` follows the recursive clause form:

* atomic formulas are unchanged;
* ``(~ f)* = ~ f*`` and ``(f \\/ g)* = f* \\/ g*`` (both disjuncts share one
  z-block, so k is the maximum of the two);
* ``(exists y . f)* = exists y < z1 . f~`` where ``f~`` is ``f*`` with every
  ``z_i`` renamed to ``z_{i+1}``.

Bounded existentials are Delta0 already and pass through unchanged except for
their body.  ``star_pnf`` is the prenex variant: pull every unbounded
quantifier to the front, then bound the i-th one by ``z_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormulaError, NotNormalizedError
from .syntax import (
    And, BddExists, BddForall, Eq, Exists, Forall, Formula, Implies, InI, Lt, Not,
    Or, Var, X, Z, all_vars, is_delta0, is_normalized, substitute, z,
)


@dataclass(frozen=True)
class StarResult:
    star: Formula
    k: int
    zblock: tuple[Var, ...]


def _check_input(f: Formula) -> None:
    used = all_vars(f)
    if any(v.ns == Z for v in used):
        raise FormulaError("input already uses reserved z-variables")


def shift_z(f: Formula, k: int, by: int = 1) -> Formula:
    """Rename z_i to z_{i+by} for 1 <= i <= k (simultaneously)."""
    if k == 0:
        return f
    return substitute(f, {z(i): z(i + by) for i in range(1, k + 1)})


def _star(f: Formula) -> tuple[Formula, int]:
    if isinstance(f, (Eq, Lt)):
        return f, 0
    if isinstance(f, InI):
        raise FormulaError("the star transformation is defined on L_A formulas only")
    if isinstance(f, Not):
        s, k = _star(f.f)
        return Not(s), k
    if isinstance(f, Or):
        s1, k1 = _star(f.f1)
        s2, k2 = _star(f.f2)
        return Or(s1, s2), max(k1, k2)
    if isinstance(f, Exists):
        s, k = _star(f.f)
        return BddExists(f.var, z(1), shift_z(s, k)), k + 1
    if isinstance(f, BddExists):
        s, k = _star(f.f)
        return BddExists(f.var, f.bound, s), k
    raise NotNormalizedError(
        f"{type(f).__name__} is outside the {{~, \\/, exists}} fragment; normalize first"
    )


def star(f: Formula) -> StarResult:
    _check_input(f)
    if not is_normalized(f):
        raise NotNormalizedError("star expects a formula over {~, \\/, exists}")
    s, k = _star(f)
    return StarResult(s, k, tuple(z(i) for i in range(1, k + 1)))


# -- prenex form ---------------------------------------------------------------


def _unfold_bounded(f: Formula) -> Formula:
    """Replace bounded quantifiers whose body is not Delta0 by guarded unbounded ones."""
    if isinstance(f, (Eq, Lt, InI)):
        return f
    if isinstance(f, Not):
        return Not(_unfold_bounded(f.f))
    if isinstance(f, (Or, And)):
        return type(f)(_unfold_bounded(f.f1), _unfold_bounded(f.f2))
    if isinstance(f, Implies):
        return Or(Not(_unfold_bounded(f.f1)), _unfold_bounded(f.f2))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, _unfold_bounded(f.f))
    if is_delta0(f.f):
        return f
    body = _unfold_bounded(f.f)
    guard = Lt(f.var, f.bound)
    if isinstance(f, BddExists):
        return Exists(f.var, And(guard, body))
    return Forall(f.var, Or(Not(guard), body))


def _rename_bound(f: Formula, counter: list[int]) -> Formula:
    """Give every unbounded quantifier a fresh x-variable, in pre-order."""
    if isinstance(f, (Eq, Lt, InI, BddExists, BddForall)):
        return f
    if isinstance(f, Not):
        return Not(_rename_bound(f.f, counter))
    if isinstance(f, (Or, And)):
        left = _rename_bound(f.f1, counter)
        return type(f)(left, _rename_bound(f.f2, counter))
    fresh = Var(X, counter[0])
    counter[0] += 1
    body = substitute(f.f, {f.var: fresh})
    return type(f)(fresh, _rename_bound(body, counter))


def _pull(f: Formula) -> tuple[list[tuple[type, Var]], Formula]:
    if isinstance(f, (Eq, Lt, InI, BddExists, BddForall)):
        return [], f
    if isinstance(f, Not):
        prefix, m = _pull(f.f)
        flipped = [(Forall if q is Exists else Exists, v) for q, v in prefix]
        return flipped, Not(m)
    if isinstance(f, (Or, And)):
        p1, m1 = _pull(f.f1)
        p2, m2 = _pull(f.f2)
        return p1 + p2, type(f)(m1, m2)
    prefix, m = _pull(f.f)
    return [(type(f), f.var)] + prefix, m


def prenex_parts(f: Formula) -> tuple[list[tuple[type, Var]], Formula]:
    """Quantifier prefix (outermost first) and Delta0 matrix of to_prenex(f)."""
    f = _unfold_bounded(f)
    used = [v.index for v in all_vars(f) if v.ns == X]
    counter = [max(used, default=0) + 1]
    return _pull(_rename_bound(f, counter))


def to_prenex(f: Formula) -> Formula:
    """Classically equivalent prenex form.

    Unbounded quantifiers are extracted leftmost-outermost; each gets a fresh
    x-variable numbered upwards from one past the largest index in f.
    Bounded quantifiers over Delta0 bodies stay inside the matrix.
    """
    prefix, matrix = prenex_parts(f)
    if not prefix:
        return f
    out = matrix
    for q, v in reversed(prefix):
        out = q(v, out)
    return out


def star_pnf(f: Formula) -> StarResult:
    _check_input(f)
    prefix, matrix = prenex_parts(f)
    if not prefix:
        return StarResult(f, 0, ())
    out = matrix
    for i in range(len(prefix), 0, -1):
        q, v = prefix[i - 1]
        out = (BddExists if q is Exists else BddForall)(v, z(i), out)
    k = len(prefix)
    return StarResult(out, k, tuple(z(i) for i in range(1, k + 1)))
