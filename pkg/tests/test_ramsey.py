import random
from itertools import combinations

import pytest

from indisc.errors import InsufficientRamseyRoom
from indisc.ramsey import is_monochromatic, ramsey_monochromatic


def test_constant_coloring_takes_prefix():
    assert ramsey_monochromatic(range(10), 2, lambda t: 0, 4) == [0, 1, 2, 3]
    assert ramsey_monochromatic([9, 3, 5, 1], 3, lambda t: "c", 3) == [1, 3, 5]


def test_doubling_pairs():
    color = lambda t: t[0] + t[0] == t[1]
    h = ramsey_monochromatic(range(31), 2, color, 4)
    assert len(h) == 4 and h == sorted(h)
    assert all(not color(p) for p in combinations(h, 2))


def test_unary_takes_largest_class():
    h = ramsey_monochromatic(range(10), 1, lambda t: t[0] % 3 == 0, 5)
    assert h == [1, 2, 4, 5, 7]


def test_pentagon_has_no_monochromatic_triangle():
    # the 5-cycle coloring is the extremal example below six points
    edge = lambda t: (t[1] - t[0]) % 5 in (1, 4)
    with pytest.raises(InsufficientRamseyRoom) as err:
        ramsey_monochromatic(range(5), 2, edge, 3)
    assert len(err.value.best) == 2


def test_six_points_always_suffice():
    rng = random.Random(0)
    for _ in range(200):
        table = {p: rng.randrange(2) for p in combinations(range(6), 2)}
        h = ramsey_monochromatic(range(6), 2, table.__getitem__, 3)
        assert is_monochromatic(h, 2, table.__getitem__)


@pytest.mark.parametrize("n", [2, 3])
def test_outputs_monochromatic(n):
    rng = random.Random(n)
    for trial in range(30):
        table = {}
        color = lambda t: table.setdefault(t, rng.randrange(2))
        try:
            h = ramsey_monochromatic(range(60), n, color, 3)
        except InsufficientRamseyRoom:
            continue
        assert is_monochromatic(h, n, color)


def test_arithmetic_ternary():
    color = lambda t: t[0] + t[1] < t[2]
    h = ramsey_monochromatic(range(1, 200), 3, color, 4)
    assert is_monochromatic(h, 3, color)


def test_target_below_arity():
    with pytest.raises(ValueError):
        ramsey_monochromatic(range(10), 3, lambda t: 0, 2)


def test_too_few_candidates():
    with pytest.raises(InsufficientRamseyRoom):
        ramsey_monochromatic(range(3), 2, lambda t: 0, 4)
