import random

import pytest

import naive
from conftest import P
from indisc.corpus import random_formula, small_witness_family
from indisc.errors import FormulaError, NotNormalizedError
from indisc.grammar import render
from indisc.star import prenex_parts, shift_z, star, star_pnf, to_prenex
from indisc.syntax import (
    BddExists, BddForall, Eq, Exists, Forall, Lt, Not, Or, all_vars, exists_depth, free_vars,
    is_delta0, normalize_connectives, Z, z,
)


def S(text):
    r = star(normalize_connectives(P(text)))
    return render(r.star), r.k


def test_atomic_unchanged():
    assert S("x1 < x2") == ("x1 < x2", 0)


def test_single_existential():
    f = P("exists y . (x + y) = S(0)")
    y = f.var
    r = star(f)
    assert r.k == 1
    assert r.star == BddExists(y, z(1), f.f)


def test_nested_existentials_shift():
    f = P("~ exists y . ~ exists w . y < w")
    y, w = f.f.var, f.f.f.f.var
    expect = Not(BddExists(y, z(1), Not(BddExists(w, z(2), Lt(y, w)))))
    r = star(f)
    assert r.star == expect and r.k == 2
    assert r.zblock == (z(1), z(2))


def test_disjunction_shares_block():
    f = P("(exists y . y = x) \\/ ~ exists y . ~ exists w . w < y")
    assert star(f).k == 2
    assert {v for v in all_vars(star(f).star) if v.ns == Z} == {z(1), z(2)}


def test_star_rejects_unnormalized_and_reserved():
    with pytest.raises(NotNormalizedError):
        star(P("forall y . y = y"))
    with pytest.raises(FormulaError):
        star(P("exists y . y < z1"))


def test_delta0_identity(corpus500):
    for f in corpus500:
        g = normalize_connectives(f)
        if is_delta0(g):
            r = star(g)
            assert r.star == g and r.k == 0


def _zcheck(f, s, level):
    """Each unbounded exists at nesting level d (0 outermost) is bounded by z_{d+1}."""
    if isinstance(f, (Eq, Lt)):
        assert s == f
        return
    if isinstance(f, Not):
        assert isinstance(s, Not)
        _zcheck(f.f, s.f, level)
    elif isinstance(f, Or):
        assert isinstance(s, Or)
        _zcheck(f.f1, s.f1, level)
        _zcheck(f.f2, s.f2, level)
    elif isinstance(f, Exists):
        assert isinstance(s, BddExists) and s.var == f.var and s.bound == z(level + 1)
        _zcheck(f.f, s.f, level + 1)
    else:
        assert isinstance(s, BddExists) and s.var == f.var and s.bound == f.bound
        _zcheck(f.f, s.f, level)


def test_laws_on_corpus(corpus500):
    for f in corpus500:
        g = normalize_connectives(f)
        r = star(g)
        assert is_delta0(r.star)
        assert r.k == exists_depth(g)
        assert free_vars(r.star) - free_vars(g) <= set(r.zblock)
        _zcheck(g, r.star, 0)


def test_shift_z():
    f = Lt(z(1), z(2))
    assert shift_z(f, 2) == Lt(z(2), z(3))
    assert shift_z(f, 0) == f


def test_prenex_examples():
    f = P("(exists y . y = x) \\/ (exists y . y < x)")
    assert render(to_prenex(f)) == "exists x3 . exists x4 . (x3 = x2 \\/ x4 < x2)"
    g = to_prenex(P("~ exists y . y < x"))
    assert isinstance(g, Forall) and g.f == Not(Lt(g.var, next(iter(free_vars(g)))))
    h = P("x1 < x2 \\/ 0 = 0")
    assert to_prenex(h) == h


def test_prenex_matrix_is_delta0(corpus500):
    for f in corpus500[:200]:
        prefix, matrix = prenex_parts(f)
        assert is_delta0(matrix)
        assert free_vars(to_prenex(f)) == free_vars(f)


def _reference_equivalent(f, g, N, trials, rng):
    vs = sorted(free_vars(f))
    for _ in range(trials):
        env = {v: rng.randrange(N + 1) for v in vs}
        assert naive.holds(f, env, N) == naive.holds(g, env, N), render(f)


def test_prenex_equivalent_on_small_domain():
    rng = random.Random(4)
    for seed in range(120):
        f = random_formula(seed, 2, 4)
        _reference_equivalent(f, to_prenex(f), 5, 4, rng)


def test_prenex_equivalent_for_fixed_family():
    rng = random.Random(5)
    for f in small_witness_family():
        _reference_equivalent(f, to_prenex(f), 8, 20, rng)


def test_pnf_star_examples():
    r = star_pnf(P("forall v . exists w . v < w"))
    assert r.k == 2
    assert isinstance(r.star, BddForall) and r.star.bound == z(1)
    assert isinstance(r.star.f, BddExists) and r.star.f.bound == z(2)
    assert r.star.f.f == Lt(r.star.var, r.star.f.var)
    h = P("x1 < x2 \\/ 0 = 0")
    assert star_pnf(h).star == h and star_pnf(h).k == 0


def test_pnf_star_is_delta0(corpus500):
    for f in corpus500:
        r = star_pnf(f)
        assert is_delta0(r.star)
        assert r.k == len(prenex_parts(f)[0])
