import random

import pytest

import naive
from conftest import P
from indisc.corpus import random_formula
from indisc.errors import NotDelta0Error, StructureError, UnboundVariableError
from indisc.evaluator import (
    Verdict3, eval_budgeted, eval_delta0, eval_over_expansion, eval_term, least_witness,
    tuple_predicate,
)
from indisc.indiscernibles import emit_indis_sentence
from indisc.syntax import InI, Not, compact_numeral, free_vars, is_delta0, numeral, x


def test_terms():
    assert eval_term(P("S(S(0)) + S(0) = 0").t1, {}) == 3
    assert eval_term(P("(x1 * x1) = 0").t1, {x(1): 7}) == 49
    for n in (0, 1, 17, 400):
        assert eval_term(numeral(n), {}) == n
    for n in range(0, 10**4 + 1, 37):
        assert eval_term(compact_numeral(n), {}) == n


def test_delta0_examples():
    f = P("exists y < x . (y + y) = x")
    (v,) = free_vars(f)
    assert eval_delta0(f, {v: 6}) is True
    assert eval_delta0(f, {v: 7}) is False
    assert eval_delta0(P("0 < 0"), {}) is False


def test_delta0_rejects_unbounded():
    with pytest.raises(NotDelta0Error):
        eval_delta0(P("exists y . y = x1"), {x(1): 0})


def test_missing_assignment():
    with pytest.raises(UnboundVariableError):
        eval_delta0(P("x1 < x2"), {x(1): 0})


def test_big_integers():
    f = P("x1 < (x2 * x2)")
    assert eval_delta0(f, {x(1): 10**40, x(2): 10**20 + 1}) is True


def test_budgeted_examples():
    assert eval_budgeted(P("exists y . x1 < y"), {x(1): 5}, 10) is Verdict3.TRUE
    assert eval_budgeted(P("exists y . y < 0"), {}, 10) is Verdict3.UNKNOWN
    assert eval_budgeted(P("exists y . y < 0"), {}, 0) is Verdict3.UNKNOWN
    assert eval_budgeted(P("~ (exists y . x1 < y)"), {x(1): 5}, 10) is Verdict3.FALSE


def test_budget_too_small_is_unknown():
    assert eval_budgeted(P("exists y . x1 < y"), {x(1): 5}, 5) is Verdict3.UNKNOWN


def test_budgeted_agrees_with_delta0(corpus500):
    rng = random.Random(1)
    seen = 0
    for f in corpus500:
        if not is_delta0(f):
            continue
        seen += 1
        for _ in range(3):
            env = {v: rng.randrange(30) for v in free_vars(f)}
            assert eval_budgeted(f, env, 0) is Verdict3.of(eval_delta0(f, env))
    assert seen > 20


def test_budgeted_monotone_in_budget():
    # a decided verdict never flips as the budget grows
    rng = random.Random(2)
    for seed in range(80):
        f = random_formula(seed, 2, 4)
        env = {v: rng.randrange(6) for v in free_vars(f)}
        first = None
        for W in (1, 3, 6, 10):
            got = eval_budgeted(f, env, W)
            if first is not None:
                assert got is first
            elif got is not Verdict3.UNKNOWN:
                first = got


def test_double_negation():
    rng = random.Random(3)
    for seed in range(60):
        f = random_formula(seed, 2, 4)
        env = {v: rng.randrange(8) for v in free_vars(f)}
        assert eval_budgeted(Not(Not(f)), env, 6) is eval_budgeted(f, env, 6)


def test_expansion_examples():
    assert eval_over_expansion(InI(numeral(5)), {}, {5, 9}, 20) is True
    assert eval_over_expansion(InI(numeral(6)), {}, {5, 9}, 20) is False
    s = emit_indis_sentence(P("x1 < x2"))
    assert free_vars(s) == set()
    assert eval_over_expansion(s, {}, {2, 7, 30, 31}, 100) is True
    s = emit_indis_sentence(P("(x1 + x1) = x2"))
    assert eval_over_expansion(s, {}, {3, 6, 12}, 100) is False


def test_expansion_rejects_i_outside_domain():
    with pytest.raises(StructureError):
        eval_over_expansion(P("0 = 0"), {}, {3, 101}, 100)


@pytest.mark.parametrize("depth", [1, 2])
def test_expansion_matches_reference(depth):
    # the compiled evaluator narrows search ranges; plain recursion does not
    rng = random.Random(depth)
    N = 7
    for seed in range(150):
        f = random_formula(1000 * depth + seed, depth, 4)
        I = frozenset(rng.sample(range(N + 1), 3))
        env = {v: rng.randrange(N + 1) for v in free_vars(f)}
        assert eval_over_expansion(f, env, I, N) == naive.holds(f, env, N, I), f


def test_expansion_matches_reference_with_predicate():
    rng = random.Random(9)
    N = 9
    texts = [
        "exists y . (I(y) /\\ x1 < y)",
        "forall y . (I(y) -> exists w < y . (w + w) = y)",
        "exists y < x1 . (I(y) /\\ ~ exists w . (I(w) /\\ y < w /\\ w < x1))",
    ]
    for t in texts:
        f = P(t, "LA_I")
        for _ in range(40):
            I = frozenset(rng.sample(range(N + 1), 4))
            env = {v: rng.randrange(N + 1) for v in free_vars(f)}
            assert eval_over_expansion(f, env, I, N) == naive.holds(f, env, N, I)


def test_least_witness():
    f = P("(x1 + x1) = x2")
    assert least_witness(f, x(1), {x(2): 10}, 100) == 5
    assert least_witness(f, x(1), {x(2): 11}, 100) is None
    assert least_witness(P("x1 < x2"), x(2), {x(1): 4}, 100) == 5


def test_tuple_predicate():
    pred = tuple_predicate(P("(x1 + x1) = x2"), [x(1), x(2)])
    assert pred((3, 6)) and not pred((3, 12))
    with pytest.raises(NotDelta0Error):
        tuple_predicate(P("exists x3 . x1 < x3"), [x(1)])
    with pytest.raises(UnboundVariableError):
        tuple_predicate(P("x1 < x2"), [x(1)])


def test_expansion_matches_reference_on_fixed_family():
    # these formulas exercise the guarded-search shortcuts, directly and in prenex form
    from indisc.corpus import small_witness_family
    from indisc.star import to_prenex

    rng = random.Random(11)
    N = 10
    for f in small_witness_family():
        for g in (f, to_prenex(f)):
            for _ in range(25):
                env = {v: rng.randrange(N + 1) for v in free_vars(g)}
                assert eval_over_expansion(g, env, (), N) == naive.holds(g, env, N)
