import json
import random
from itertools import combinations, product

import pytest

from conftest import P
from indisc.corpus import random_formula
from indisc.errors import (
    DomainError, FormulaError, GuardUnreachable, InsufficientRamseyRoom, StructureError,
)
from indisc.evaluator import tuple_predicate
from indisc.indiscernibles import (
    IndiscernibleWitness, apart_failure, apartness_family, check_apart, check_indis,
    check_indis_plus, check_scheme, emit_apart_sentence, emit_indis_circ_sentence,
    emit_indis_plus_sentence, emit_indis_sentence, mine_diagonal, mine_indiscernibles,
    run_checks,
)
from indisc.syntax import free_vars, x

DOUBLING = "(x1 + x1) = x2"


def test_emitted_sentences_are_closed():
    f = P("x1 < x2")
    for s in (emit_indis_sentence(f), emit_indis_circ_sentence(f), emit_apart_sentence(f),
              emit_indis_plus_sentence(f)):
        assert free_vars(s) == set()


def test_indis_examples():
    assert check_indis(P("x1 < x2"), [1, 5, 9, 40], 100)
    assert check_scheme(emit_indis_sentence(P("x1 < x2")), [1, 5, 9, 40], 100)
    assert not check_indis(P(DOUBLING), [3, 6, 12], 100)
    assert not check_scheme(emit_indis_sentence(P(DOUBLING)), [3, 6, 12], 100)


def test_guarded_variant_drops_small_elements():
    f = P(DOUBLING)
    # with a stand-in code of 5 only the pair (6, 12) remains, and it is a doubling pair
    five = lambda g: 5
    assert check_indis(f, [3, 6, 12], 100, guard_code=5)
    assert check_scheme(emit_indis_circ_sentence(f, coding=five), [3, 6, 12], 100)
    assert not check_indis(f, [3, 6, 12], 100, guard_code=2)
    assert not check_scheme(emit_indis_circ_sentence(f, coding=lambda g: 2), [3, 6, 12], 100)


def test_apart_examples():
    f = P(DOUBLING)
    assert check_apart(f, [4, 10], 100, x(2))
    assert check_scheme(emit_apart_sentence(f, x(2)), [4, 10], 100)
    assert not check_apart(f, [4, 6], 100, x(2))
    assert not check_scheme(emit_apart_sentence(f, x(2)), [4, 6], 100)
    assert apart_failure(f, [4, 6], 100, x(2)).witness == 6
    g = P("x2 < 0")
    assert check_apart(g, [1, 2, 3], 10, x(2))
    assert check_scheme(emit_apart_sentence(g, x(2)), [1, 2, 3], 10)


def test_apart_needs_witness_variable():
    with pytest.raises(FormulaError):
        emit_apart_sentence(P("0 = 0"))


def _brute_plus(f, I, r):
    """Every pivot i sees the same parameter pattern on all increasing r-tuples above it."""
    vs = sorted(free_vars(f))
    n = len(vs) - 1 - r
    pred = tuple_predicate(f, vs)
    for i in I:
        pats = set()
        for tail in combinations([e for e in I if e > i], r):
            pats.add(tuple(pred(p + (i,) + tail) for p in product(range(i), repeat=n)))
        if len(pats) > 1:
            return False
    return True


def test_indis_plus_examples():
    assert check_indis_plus(P("x1 < x2"), [2, 3, 8, 11], 20)
    f = P("(x1 + x2) < x3")
    rng = random.Random(0)
    seen = set()
    for _ in range(40):
        I = sorted(rng.sample(range(1, 30), 4))
        got = check_indis_plus(f, I, 40)
        assert got == _brute_plus(f, I, 1)
        assert got == check_scheme(emit_indis_plus_sentence(f), I, 40)
        seen.add(got)
    assert seen == {True, False}


def test_direct_and_scheme_checkers_agree():
    rng = random.Random(1)
    N = 12
    for seed in range(200):
        f = random_formula(seed, 1, 4)
        I = sorted(rng.sample(range(N + 1), rng.randrange(2, 5)))
        if free_vars(f):
            assert check_indis(f, I, N) == check_scheme(emit_indis_sentence(f), I, N)
        if len(free_vars(f)) >= 2:
            assert check_indis_plus(f, I, N) == check_scheme(emit_indis_plus_sentence(f), I, N)
        if free_vars(f):
            y = max(free_vars(f))
            assert check_apart(f, I, N, y) == check_scheme(emit_apart_sentence(f, y), I, N)


def test_structure_errors():
    with pytest.raises(StructureError):
        check_indis(P("x1 < x2"), [3, 200], 100)
    with pytest.raises(StructureError):
        IndiscernibleWitness(I=(5,), family=(), N=10)


def test_apartness_family_finds_unbounded_quantifiers():
    fam = apartness_family([P("exists x9 . (x9 < S(x1) /\\ x1 = (x9 + x9))")])
    assert fam and all(v in free_vars(g) for g, v in fam)
    assert apartness_family([P(DOUBLING)]) == []


def test_mine_constant_family():
    w = mine_indiscernibles([P("x1 < x2")], 100, 5)
    assert len(w.I) == 5 and all(c.passed for c in w.checks)
    assert check_indis(P("x1 < x2"), w.I, 100)


def test_mine_two_formulas():
    fam = [P(DOUBLING), P("x1 < x2")]
    w = mine_indiscernibles(fam, 200, 4)
    for f in fam:
        assert check_indis(f, w.I, 200)


def test_strict_guard_unreachable():
    with pytest.raises(GuardUnreachable):
        mine_indiscernibles([P("x1 < x2")], 100, 3, "strict")


def test_strict_guard_reachable_with_small_codes():
    w = mine_indiscernibles([P(DOUBLING)], 60, 3, "strict", coding=lambda g: 7)
    assert w.I[0] >= 7 and w.I[1] > 7
    assert [c.scheme for c in w.checks] == ["indis_circ"]
    assert all(c.passed for c in w.checks)


def test_insufficient_room():
    with pytest.raises(InsufficientRamseyRoom) as err:
        mine_indiscernibles([P(DOUBLING)], 6, 6)
    assert err.value.best
    with pytest.raises(DomainError):
        mine_indiscernibles([P(DOUBLING)], 5, 6)


def test_mine_diagonal_example():
    f = P("(x1 + x2) < x3")
    w = mine_diagonal([f], 500, 4)
    assert check_indis_plus(f, w.I, 500)
    assert check_indis(f, w.I, 500)
    w = mine_diagonal([P("x1 < x2")], 50, 4)
    assert all(c.passed for c in w.checks)


def test_mine_diagonal_respects_apartness():
    f = P("exists x9 . (x9 < S(x2) /\\ (x1 + x9) = x2)")
    g = P("exists x9 . (x9 < S(x1) /\\ x1 = (x9 + x9))")
    w = mine_diagonal([f, g], 2000, 5, pool=100)
    assert w.apart_family and w.apart_ok()
    for h, v in w.apart_family:
        assert check_apart(h, w.I, w.N, v)


def test_witness_json_roundtrip(tmp_path):
    w = mine_diagonal([P("(x1 + x2) < x3"), P(DOUBLING)], 300, 4)
    data = json.loads(json.dumps(w.to_json()))
    back = IndiscernibleWitness.from_json(data)
    assert back == w
    assert run_checks(back) == list(w.checks)


def test_tail_keeps_passing_checks():
    w = mine_diagonal([P("(x1 + x2) < x3"), P(DOUBLING), P("x1 < x2")], 400, 6)
    for c in w.I[:-2]:  # every distinct tail with >= 2 elements
        t = w.tail(c)
        for rec in t.checks:
            if w.passed(rec.scheme, rec.index):
                assert rec.passed


def test_thread_count_does_not_change_output(monkeypatch):
    fam = [P("exists x9 . (x9 < S(x2) /\\ (x1 + x9) = x2)"), P("(x1 + x2) < x3")]
    monkeypatch.setenv("INDISC_THREADS", "1")
    one = mine_diagonal(fam, 1000, 5, pool=80).to_json()
    monkeypatch.setenv("INDISC_THREADS", "8")
    eight = mine_diagonal(fam, 1000, 5, pool=80).to_json()
    assert one == eight
