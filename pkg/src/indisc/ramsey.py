"""Finite Ramsey thinning: monochromatic subsets for colorings of n-tuples.

The default strategy follows the usual constructive proof.  Pick the least
candidate, split the remaining ones by how tuples through the chosen elements
are colored, continue inside the largest class.  The chosen sequence is
end-homogeneous (the color of a tuple depends only on all but its last
element), so the problem drops to arity n-1 on that sequence.  Ties between
classes go to the lexicographically least color key.

For arity 2 and at most ``EXACT_LIMIT`` candidates an exact maximum
monochromatic clique search backs the greedy answer up.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Hashable, Sequence

from .errors import InsufficientRamseyRoom

Color = Callable[[tuple[int, ...]], Hashable]

EXACT_LIMIT = 64


def _largest_class(groups: dict) -> list[int]:
    key = min(groups, key=lambda k: (-len(groups[k]), _sort_key(k)))
    return groups[key]


def _sort_key(k):
    try:
        return (0, k) if not isinstance(k, (frozenset, set)) else (1, tuple(sorted(k)))
    except TypeError:
        return (2, repr(k))


def _end_homogeneous(candidates: Sequence[int], n: int, color: Color) -> list[int]:
    """Greedy sequence whose n-tuple colors ignore the last element."""
    chosen: list[int] = []
    pool = list(candidates)
    while pool:
        a = pool.pop(0)
        chosen.append(a)
        if len(chosen) < n - 1 or not pool:
            continue
        heads = [t for t in combinations(chosen[:-1], n - 2)] if n >= 2 else [()]
        groups: dict = {}
        for y in pool:
            key = tuple(color(h + (a, y)) for h in heads)
            groups.setdefault(key, []).append(y)
        pool = _largest_class(groups)
    return chosen


def _greedy(candidates: Sequence[int], n: int, color: Color) -> list[int]:
    if n == 0 or len(candidates) < n:
        return list(candidates)
    if n == 1:
        groups: dict = {}
        for c in candidates:
            groups.setdefault(color((c,)), []).append(c)
        return _largest_class(groups)
    seq = _end_homogeneous(candidates, n, color)
    if len(seq) <= n - 1:
        return seq
    # induced (n-1)-coloring on the sequence minus its last element
    nxt = {seq[s]: seq[s + 1] for s in range(len(seq) - 1)}
    induced_color = lambda t: color(t + (nxt[t[-1]],))
    # tuples ending in the final element also follow the induced coloring
    return _greedy(seq[:-1], n - 1, induced_color) + [seq[-1]]


def _exact_pairs(candidates: Sequence[int], color: Color) -> list[int]:
    """Maximum monochromatic clique for a 2-coloring-like map (exact search)."""
    cand = list(candidates)
    colors: dict = {}
    for a, b in combinations(cand, 2):
        colors[(a, b)] = color((a, b))
    best: list[int] = cand[:1]
    keys = sorted(set(colors.values()), key=_sort_key)
    for key in keys:
        adj = {a: set() for a in cand}
        for (a, b), c in colors.items():
            if c == key:
                adj[a].add(b)
                adj[b].add(a)

        def expand(clique: list[int], options: list[int]) -> None:
            nonlocal best
            if len(clique) + len(options) <= len(best):
                return
            if not options:
                best = list(clique)
                return
            for idx, v in enumerate(options):
                if len(clique) + len(options) - idx <= len(best):
                    return
                expand(clique + [v], [w for w in options[idx + 1:] if w in adj[v]])

        expand([], cand)
    return sorted(best)


def is_monochromatic(h: Sequence[int], n: int, color: Color) -> bool:
    seen = {color(t) for t in combinations(h, n)}
    return len(seen) <= 1


def ramsey_monochromatic(
    candidates: Sequence[int],
    n: int,
    color: Color,
    m: int,
    *,
    truncate: bool = True,
) -> list[int]:
    """A subset of ``candidates`` of size >= m on which all n-tuples share a color.

    Returns the first m elements by default (the whole homogeneous set with
    ``truncate=False``).  Raises InsufficientRamseyRoom carrying the best set
    found when the strategy cannot reach m.
    """
    cand = sorted(set(candidates))
    if m < n:
        raise ValueError("target size must be at least the arity")
    if len(cand) < m:
        raise InsufficientRamseyRoom(f"only {len(cand)} candidates for target {m}", cand)
    h = _greedy(cand, n, color)
    if len(h) < m and n == 2 and len(cand) <= EXACT_LIMIT:
        h = max(h, _exact_pairs(cand, color), key=len)
    if len(h) < m:
        raise InsufficientRamseyRoom(
            f"homogeneous set of size {len(h)} < {m} for arity {n}", h
        )
    return h[:m] if truncate else h
