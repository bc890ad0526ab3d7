"""Membership decisions for the induced satisfaction predicate, and audits.

``sigma_membership`` runs the decision procedure: star the formula, pick the
first element j of I above the arguments (and above the code of the formula
under the strict guard), bound the k fresh variables by the next k elements
of I, and evaluate the resulting bounded formula.

The audits compare those decisions with direct truth (``verify_nabla``),
with the recursive truth conditions (``tarski_audit``) and with themselves
on a tail of I (``cofinal_stability_audit``).  Failures are reported, never
raised: a Disagree always carries the apartness status of the witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Mapping, Sequence

from .coding import CodingPolicy, goedel_encode
from .errors import FormulaError, GuardUnreachable, IExhausted, StructureError
from .evaluator import Verdict3, eval_budgeted, eval_delta0, eval_over_expansion, eval_term
from .grammar import render
from .indiscernibles import (
    UNBOUNDED_FRACTION, IndiscernibleWitness, apart_failure, apartness_family, check_indis,
    check_scheme, emit_indis_theta_sentence,
)
from .parallel import pmap
from .star import StarResult, star, star_pnf
from .syntax import (
    BddExists, Eq, Exists, Formula, Lt, Not, Or, Var, free_vars, normalize_connectives,
    sorted_free_vars,
)

Guard = Literal["relaxed", "strict"]
Variant = Literal["star", "pnf"]
Args = Sequence[int] | Mapping[Var, int]


@dataclass(frozen=True)
class SatVerdict:
    member: bool
    j: int
    iblock: tuple[int, ...]
    star_used: StarResult
    trace: dict | None = None

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "j": self.j,
            "iblock": list(self.iblock),
            "star": render(self.star_used.star),
            "k": self.star_used.k,
        }


def _assignment(f: Formula, a: Args) -> dict[Var, int]:
    vs = sorted_free_vars(f)
    if isinstance(a, Mapping):
        missing = [v for v in vs if v not in a]
        if missing:
            raise FormulaError(f"no value for {', '.join(map(str, missing))}")
        out = {v: a[v] for v in vs}
    else:
        if len(a) != len(vs):
            raise FormulaError(f"formula has {len(vs)} free variables, got {len(a)} values")
        out = dict(zip(vs, a))
    if any(val < 0 for val in out.values()):
        raise FormulaError("arguments must be natural numbers")
    return out


@lru_cache(maxsize=4096)
def _starred(f: Formula, variant: str) -> StarResult:
    if variant == "star":
        return star(normalize_connectives(f))
    if variant == "pnf":
        return star_pnf(f)
    raise ValueError(f"unknown star variant {variant!r}")


def sigma_membership(
    f: Formula,
    a: Args,
    W: IndiscernibleWitness,
    guard: Guard | None = None,
    variant: Variant = "star",
    *,
    I: Sequence[int] | None = None,
    coding: CodingPolicy = goedel_encode,
) -> SatVerdict:
    """Decide membership of (f, a) by the guard-and-bound procedure.

    ``a`` is a tuple for the sorted free variables of f or an explicit map.
    ``I`` overrides the witness set (used for tail comparisons).
    """
    guard = W.guard if guard is None else guard
    elems = list(W.I if I is None else I)
    env = _assignment(f, a)
    res = _starred(f, variant)
    floor = max(env.values(), default=-1)
    if guard == "strict":
        code = coding(f)
        if code >= elems[-1]:
            raise GuardUnreachable(f"no element of I exceeds the code {code}")
        floor = max(floor, code)
    elif guard != "relaxed":
        raise ValueError(f"unknown guard mode {guard!r}")
    pos = next((s for s, e in enumerate(elems) if e > floor), None)
    if pos is None:
        raise IExhausted(f"no element of I above {floor}")
    block = elems[pos + 1: pos + 1 + res.k]
    if len(block) < res.k:
        raise IExhausted(f"need {res.k} elements of I above {elems[pos]}, found {len(block)}")
    full = {**env, **dict(zip(res.zblock, block))}
    member = eval_delta0(res.star, full)
    return SatVerdict(member, elems[pos], tuple(block), res)


# -- direct-truth audit --------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _apart_status(f: Formula, I: tuple[int, ...], N: int) -> tuple[bool, tuple]:
    failures = []
    for matrix, v in apartness_family([f]):
        bad = apart_failure(matrix, I, N, v)
        if bad is not None:
            failures.append((render(matrix), str(v), bad.i, bad.j, bad.params, bad.witness))
    return not failures, tuple(failures)


@dataclass(frozen=True)
class NablaResult:
    status: Literal["agree", "disagree", "undetermined"]
    formula: Formula
    args: dict[Var, int]
    direct: Verdict3
    verdict: SatVerdict | None
    apart_ok: bool
    apart_failures: tuple = ()

    def to_json(self) -> dict:
        return {
            "formula": render(self.formula),
            "args": {str(v): val for v, val in sorted(self.args.items())},
            "status": self.status,
            "direct": self.direct.value,
            "sigma": None if self.verdict is None else self.verdict.to_json(),
            "apart_ok": self.apart_ok,
            "apart_failures": [
                {"formula": m, "var": v, "i": i, "j": j, "params": list(p), "witness": w}
                for m, v, i, j, p, w in self.apart_failures
            ],
        }


def verify_nabla(
    f: Formula,
    a: Args,
    W: IndiscernibleWitness,
    budget: int,
    guard: Guard | None = None,
    variant: Variant = "star",
    *,
    coding: CodingPolicy = goedel_encode,
) -> NablaResult:
    """Compare the procedure's verdict with budgeted direct truth."""
    env = _assignment(f, a)
    direct = eval_budgeted(f, env, budget)
    ok, failures = _apart_status(f, tuple(W.I), W.N)
    verdict = sigma_membership(f, env, W, guard, variant, coding=coding)
    if direct is Verdict3.UNKNOWN:
        status = "undetermined"
    else:
        status = "agree" if verdict.member == (direct is Verdict3.TRUE) else "disagree"
    return NablaResult(status, f, env, direct, verdict, ok, failures)


def _rates(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    return {k: (v / total if total else 0.0) for k, v in counts.items()}


def nabla_audit(
    corpus: Sequence[tuple[Formula, Args]],
    W: IndiscernibleWitness,
    budget: int,
    guard: Guard | None = None,
    variant: Variant = "star",
) -> dict:
    def one(item):
        try:
            return verify_nabla(item[0], item[1], W, budget, guard, variant).to_json()
        except IExhausted as exc:
            return {"formula": render(item[0]), "args": list(item[1]), "status": "exhausted",
                    "detail": str(exc)}

    items = pmap(one, corpus)
    counts = {"agree": 0, "disagree": 0, "undetermined": 0, "exhausted": 0}
    for it in items:
        counts[it["status"]] += 1
    decided = counts["agree"] + counts["disagree"]
    return {
        "audit": "nabla",
        "budget": budget,
        "variant": variant,
        "counts": counts,
        "rates": _rates(counts),
        "agree_rate_decided": counts["agree"] / decided if decided else None,
        "disagree_with_apart_ok": sum(
            1 for it in items if it["status"] == "disagree" and it["apart_ok"]
        ),
        "items": items,
    }


# -- recursive truth conditions -------------------------------------------------------------


def _restrict(g: Formula, env: Mapping[Var, int]) -> dict[Var, int]:
    return {v: env[v] for v in free_vars(g)}


def _exists_parts(g: Formula) -> tuple[Var, Formula, Formula | None] | None:
    if isinstance(g, Exists):
        return g.var, g.f, None
    if isinstance(g, BddExists):
        return g.var, g.f, g.bound
    return None


def _clause_checks(
    g: Formula, env: dict[Var, int], W: IndiscernibleWitness, guard, out: list, seen: set
) -> None:
    """Check the clause for g at env, then recurse into the immediate subformulas."""
    key = (g, tuple(sorted(env.items())))
    if key in seen:
        return
    seen.add(key)

    def S(h: Formula, e: Mapping[Var, int]) -> SatVerdict:
        return sigma_membership(h, _restrict(h, e), W, guard)

    try:
        top = S(g, env)
    except IExhausted:
        out.append({"clause": "skipped", "formula": render(g), "pass": None, "same_j": None})
        return
    if isinstance(g, (Eq, Lt)):
        ok = top.member == eval_delta0(g, env)
        out.append({"clause": "atomic", "formula": render(g), "pass": ok, "same_j": True})
        return
    if isinstance(g, Not):
        sub = S(g.f, env)
        out.append({"clause": "not", "formula": render(g), "pass": top.member == (not sub.member),
                    "same_j": sub.j == top.j})
        _clause_checks(g.f, _restrict(g.f, env), W, guard, out, seen)
        return
    if isinstance(g, Or):
        s1, s2 = S(g.f1, env), S(g.f2, env)
        out.append({"clause": "or", "formula": render(g),
                    "pass": top.member == (s1.member or s2.member),
                    "same_j": s1.j == top.j == s2.j})
        _clause_checks(g.f1, _restrict(g.f1, env), W, guard, out, seen)
        _clause_checks(g.f2, _restrict(g.f2, env), W, guard, out, seen)
        return
    parts = _exists_parts(g)
    if parts is None:
        raise FormulaError(f"{type(g).__name__} is not in the normalized fragment")
    y, body, bound = parts
    if bound is None:
        # the witness bound is the first bounding element above j
        limit = top.iblock[0]
        clause = "exists"
    else:
        limit = eval_term(bound, env)
        clause = "bdd_exists"
    found = None
    for b in range(limit):
        e = {**env, y: b}
        try:
            if S(body, e).member:
                found = b
                break
        except IExhausted:
            continue
    out.append({"clause": clause, "formula": render(g), "pass": top.member == (found is not None),
                "same_j": True, "bound": limit})
    # descend with the least witness (or 0 when there is none)
    b = 0 if found is None else found
    _clause_checks(body, _restrict(body, {**env, y: b}), W, guard, out, seen)


def tarski_audit(
    corpus: Sequence[tuple[Formula, Args]],
    W: IndiscernibleWitness,
    guard: Guard | None = None,
) -> dict:
    """Recursive truth conditions for the induced predicate over the corpus closure.

    The closure follows each item down its normalized syntax tree; under an
    existential it continues with the least witness found below the bound.
    """

    def one(item):
        f, a = item
        g = normalize_connectives(f)
        env = _assignment(f, a)
        rows: list = []
        _clause_checks(g, _restrict(g, env), W, guard, rows, set())
        ok, _ = _apart_status(f, tuple(W.I), W.N)
        for row in rows:
            row["apart_ok"] = ok
        return rows

    rows = [r for chunk in pmap(one, corpus) for r in chunk]
    summary: dict = {}
    for r in rows:
        if r["pass"] is None:
            continue
        clause = r["clause"]
        if clause == "or" and not r["same_j"]:
            clause = "or_mismatched_j"
        s = summary.setdefault(clause, {"pass": 0, "fail": 0, "fail_apart_ok": 0})
        s["pass" if r["pass"] else "fail"] += 1
        if not r["pass"] and r["apart_ok"]:
            s["fail_apart_ok"] += 1
    for s in summary.values():
        s["rate"] = s["pass"] / (s["pass"] + s["fail"])
    return {
        "audit": "tarski",
        "clauses": dict(sorted(summary.items())),
        "skipped": sum(1 for r in rows if r["pass"] is None),
        "items": rows,
    }


# -- tails ---------------------------------------------------------------------------------


def cofinal_stability_audit(
    corpus: Sequence[tuple[Formula, Args]],
    W: IndiscernibleWitness,
    tail_start: int,
    guard: Guard | None = None,
) -> dict:
    """Compare decisions under I with those under I[tail_start:]."""
    tail = list(W.I[tail_start:])
    if len(tail) < 2:
        raise StructureError(f"tail from index {tail_start} has {len(tail)} elements; need 2")

    def one(item):
        f, a = item
        try:
            full = sigma_membership(f, a, W, guard)
            cut = sigma_membership(f, a, W, guard, I=tail)
        except IExhausted as exc:
            return {"formula": render(f), "status": "exhausted", "detail": str(exc)}
        return {
            "formula": render(f),
            "status": "identical" if full.member == cut.member else "different",
            "full": full.to_json(),
            "tail": cut.to_json(),
        }

    items = pmap(one, corpus)
    counts = {"identical": 0, "different": 0, "exhausted": 0}
    for it in items:
        counts[it["status"]] += 1
    diagonal_ok = W.diagonal and all(c.passed for c in W.checks if c.scheme == "indis_plus")
    return {
        "audit": "cofinal",
        "tail_start": tail_start,
        "tail": tail,
        "diagonal_ok": diagonal_ok,
        "counts": counts,
        "items": items,
    }


# -- definable classes -------------------------------------------------------------------------


def definable_class_check(theta: Formula, family: Sequence[Formula], N: int) -> dict:
    """Indiscernibility of the class {m <= N : theta(m)} for each family member.

    Each verdict is computed twice: directly on the class, and by evaluating
    the emitted relativized sentence over [0, N].
    """
    tv = sorted_free_vars(theta)
    if len(tv) != 1:
        raise FormulaError("theta must have exactly one free variable")
    members = [m for m in range(N + 1) if eval_over_expansion(theta, {tv[0]: m}, (), N)]
    rows = []
    for f in family:
        direct = check_indis(f, members, N)
        sentence = emit_indis_theta_sentence(f, theta)
        rows.append({
            "formula": render(f),
            "direct": direct,
            "sentence": render(sentence),
            "sentence_holds": check_scheme(sentence, (), N),
        })
    return {
        "theta": render(theta),
        "N": N,
        "I_theta": members,
        "unbounded": {"max": members[-1] if members else None,
                      "threshold": UNBOUNDED_FRACTION * N,
                      "reached": bool(members) and members[-1] >= UNBOUNDED_FRACTION * N},
        "checks": rows,
    }
