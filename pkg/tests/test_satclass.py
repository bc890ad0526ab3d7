import pytest

from conftest import P
from indisc.corpus import small_witness_family
from indisc.errors import GuardUnreachable, IExhausted, StructureError
from indisc.evaluator import eval_delta0
from indisc.indiscernibles import IndiscernibleWitness, check_indis, mine_diagonal
from indisc.satclass import (
    cofinal_stability_audit, definable_class_check, nabla_audit, sigma_membership,
    tarski_audit, verify_nabla,
)
from indisc.syntax import free_vars, is_delta0


def W(I, family=(), N=100):
    return IndiscernibleWitness(I=tuple(I), family=tuple(family), N=N)


def test_membership_example():
    f = P("exists y . x < y")
    v = sigma_membership(f, (5,), W([8, 20, 50]))
    assert v.member is True and v.j == 8 and v.iblock == (20,)
    assert v.to_json()["k"] == 1


def test_closed_false_sentence():
    v = sigma_membership(P("0 < 0"), (), W([3, 9]))
    assert v.member is False and v.iblock == () and v.star_used.k == 0


def test_empty_search():
    assert sigma_membership(P("exists y . y < x"), (0,), W([3, 9, 40])).member is False


def test_guard_element_above_arguments():
    v = sigma_membership(P("exists y . x < y"), (8,), W([8, 20, 50]))
    assert v.j == 20 and v.iblock == (50,)


def test_exhausted():
    with pytest.raises(IExhausted):
        sigma_membership(P("exists y . x < y"), (20,), W([8, 20, 50]))
    with pytest.raises(IExhausted):
        sigma_membership(P("x1 < x2"), (60, 1), W([8, 20, 50]))


def test_strict_guard_unreachable():
    with pytest.raises(GuardUnreachable):
        sigma_membership(P("x1 < x2"), (1, 2), W([8, 20, 50]), guard="strict")


def test_strict_guard_with_small_codes():
    v = sigma_membership(P("x1 < x2"), (1, 2), W([8, 20, 50]), guard="strict",
                         coding=lambda g: 10)
    assert v.j == 20


def test_delta0_membership_is_truth(corpus500):
    w = W([50, 60])
    for f in corpus500:
        if is_delta0(f):
            a = tuple(range(3, 3 + len(free_vars(f))))
            assert sigma_membership(f, a, w).member == eval_delta0(f, dict(zip(sorted(free_vars(f)), a)))


def test_nabla_agree():
    r = verify_nabla(P("exists y . x < y"), (5,), W([8, 20, 50]), 100)
    assert r.status == "agree"


def test_nabla_undetermined():
    r = verify_nabla(P("exists y . y < x"), (0,), W([3, 9, 40]), 100)
    assert r.status == "undetermined"


def test_dense_witness_disagrees():
    # x = 3 has the witness 6, which is not below the next element 6
    f = P("exists y . y = (x + x)")
    r = verify_nabla(f, (3,), W([4, 6, 9]), 100)
    assert r.status == "disagree"
    assert r.apart_ok is False and r.apart_failures
    assert r.to_json()["apart_ok"] is False


def test_nabla_audit_counts():
    w = W([8, 20, 50])
    cases = [(P("exists y . x < y"), (5,)), (P("exists y . y < x"), (0,)),
             (P("exists y . x < y"), (30,))]
    rep = nabla_audit(cases, w, 100)
    assert rep["counts"] == {"agree": 1, "disagree": 0, "undetermined": 1, "exhausted": 1}
    assert rep["agree_rate_decided"] == 1.0


@pytest.fixture(scope="module")
def mined():
    fam = small_witness_family()
    return fam, mine_diagonal(fam, 3000, 7, pool=80)


def test_tarski_on_family(mined):
    fam, w = mined
    cases = [(f, tuple(range(2, 2 + len(free_vars(f))))) for f in fam]
    rep = tarski_audit(cases, w)
    for clause in ("not", "or", "exists"):
        if clause in rep["clauses"]:
            assert rep["clauses"][clause]["rate"] == 1.0, clause
    assert "not" in rep["clauses"] and "exists" in rep["clauses"]


def test_cofinal_on_family(mined):
    fam, w = mined
    cases = [(f, (1,) * len(free_vars(f))) for f in fam]
    rep = cofinal_stability_audit(cases, w, 2)
    assert rep["counts"]["different"] == 0 and rep["counts"]["identical"] > 0


def test_cofinal_needs_two_elements():
    with pytest.raises(StructureError):
        cofinal_stability_audit([], W([8, 20, 50]), 2)


def test_cofinal_delta0_always_identical(corpus500):
    cases = [(f, (1,) * len(free_vars(f))) for f in corpus500 if is_delta0(f)][:80]
    rep = cofinal_stability_audit(cases, W([10, 20, 30, 40]), 2)
    assert rep["counts"]["identical"] == len(cases)


def test_non_diagonal_witness_may_differ():
    # cutting the head moves the bound from 4 to 30, past the only witnesses
    f = P("exists y . S(S(S(S(S(x))))) < y")
    rep = cofinal_stability_audit([(f, (0,))], W([1, 4, 20, 30]), 2)
    assert rep["counts"]["different"] == 1 and rep["diagonal_ok"] is False


def test_definable_dense_class():
    rep = definable_class_check(P("x = x"), [P("(x1 + x1) = x2")], 30)
    assert rep["I_theta"] == list(range(31))
    assert rep["checks"][0]["direct"] is False
    assert rep["checks"][0]["sentence_holds"] is False


def test_definable_odd_numbers():
    theta = P("~ exists y < S(x) . (y + y) = x")
    fam = [P("(x1 + x1) = x2"), P("x1 < x2"), P("(x1 + x2) < x3")]
    rep = definable_class_check(theta, fam, 15)
    odds = [m for m in range(16) if m % 2]
    assert rep["I_theta"] == odds
    for row, f in zip(rep["checks"], fam):
        assert row["direct"] == check_indis(f, odds, 15) == row["sentence_holds"]


def test_definable_mined_set():
    fam = [P("(x1 + x1) = x2"), P("x1 < x2")]
    w = mine_diagonal(fam, 40, 4)
    theta = P(" \\/ ".join(f"x = {'S(' * i}0{')' * i}" for i in w.I))
    rep = definable_class_check(theta, fam, 40)
    assert rep["I_theta"] == list(w.I)
    assert all(r["direct"] and r["sentence_holds"] for r in rep["checks"])
