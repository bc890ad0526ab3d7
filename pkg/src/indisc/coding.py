"""Goedel numbering of formulas via Cantor pairing.

``code(node) = pair(tag, payload)`` where the payload folds the child codes
with ``pair`` (a leaf has payload 0), and a variable is coded as
``pair(namespace, index)`` with namespace 0 for x and 1 for z.  Every proper
subterm or subformula gets a strictly smaller code.

The numbering is only one possible choice; anything that depends on it
(the code guard) accepts a ``CodingPolicy`` so another scheme can be swapped
in.
"""

from __future__ import annotations

from math import isqrt
from typing import Protocol

try:  # codes reach millions of bits; gmpy2 multiplies them much faster
    from gmpy2 import isqrt as _isqrt, mpz as _big
except ImportError:  # pragma: no cover
    _isqrt, _big = isqrt, int

from .errors import NotACodeError
from .syntax import (
    Add, And, BddExists, BddForall, Eq, Exists, Forall, Formula, Implies, InI,
    Lt, Mul, Not, Or, Succ, Term, Var, X, Z, Zero,
)

TAGS: dict[type, int] = {
    Zero: 0, Var: 1, Succ: 2, Add: 3, Mul: 4, Eq: 5, Lt: 6, InI: 7, Not: 8,
    Or: 9, And: 10, Implies: 11, Exists: 12, Forall: 13, BddExists: 14,
    BddForall: 15,
}
_BY_TAG = {v: k for k, v in TAGS.items()}
_NS = {X: 0, Z: 1}
_NS_BACK = {0: X, 1: Z}


def pair(a: int, b: int) -> int:
    s = a + b
    if s > 1 << 64 and not isinstance(s, type(_big(0))):
        s, b = _big(s), _big(b)
    return s * (s + 1) // 2 + b


def unpair(c: int) -> tuple[int, int]:
    if c < 0:
        raise NotACodeError(f"{c} is negative")
    w = (_isqrt(8 * c + 1) - 1) // 2
    b = c - w * (w + 1) // 2
    return w - b, b


def _var_code(v: Var) -> int:
    return pair(_big(_NS[v.ns]), _big(v.index))


def _encode(node) -> int:
    depth = 0
    while isinstance(node, Succ):
        node = node.t
        depth += 1
    c = _encode_node(node)
    for _ in range(depth):
        c = pair(_big(2), c)
    return c


def _encode_node(node) -> int:
    tag = TAGS[type(node)]
    if isinstance(node, Zero):
        payload = _big(0)
    elif isinstance(node, Var):
        payload = _var_code(node)
    elif isinstance(node, InI):
        payload = _encode(node.t)
    elif isinstance(node, (Add, Mul, Eq, Lt)):
        payload = pair(_encode(node.t1), _encode(node.t2))
    elif isinstance(node, Not):
        payload = _encode(node.f)
    elif isinstance(node, (Or, And, Implies)):
        payload = pair(_encode(node.f1), _encode(node.f2))
    elif isinstance(node, (Exists, Forall)):
        payload = pair(_var_code(node.var), _encode(node.f))
    else:
        payload = pair(_var_code(node.var), pair(_encode(node.bound), _encode(node.f)))
    return pair(tag, payload)


def goedel_encode(f: Formula | Term) -> int:
    return int(_encode(f))


def _decode_var(c: int) -> Var:
    ns, idx = unpair(c)
    if ns not in _NS_BACK or idx < 1:
        raise NotACodeError(f"{c} does not code a variable")
    return Var(_NS_BACK[int(ns)], int(idx))


_TERMS = (Zero, Var, Succ, Add, Mul)


def _decode(c: int, want_term: bool):
    tag, payload = unpair(c)
    cls = _BY_TAG.get(tag)
    if cls is None or (cls in _TERMS) != want_term:
        raise NotACodeError(f"{c} is not a code of a {'term' if want_term else 'formula'}")
    if cls is Zero:
        if payload != 0:
            raise NotACodeError(f"{c} is not a code")
        return Zero()
    if cls is Var:
        return _decode_var(payload)
    if cls is Succ:
        depth = 1
        while True:
            tag, inner = unpair(payload)
            if tag != 2:
                break
            payload = inner
            depth += 1
        t = _decode(payload, True)
        for _ in range(depth):
            t = Succ(t)
        return t
    if cls is InI:
        return InI(_decode(payload, True))
    if cls in (Add, Mul, Eq, Lt):
        a, b = unpair(payload)
        return cls(_decode(a, True), _decode(b, True))
    if cls is Not:
        return Not(_decode(payload, False))
    if cls in (Or, And, Implies):
        a, b = unpair(payload)
        return cls(_decode(a, False), _decode(b, False))
    v, rest = unpair(payload)
    if cls in (Exists, Forall):
        return cls(_decode_var(v), _decode(rest, False))
    bound, body = unpair(rest)
    try:
        return cls(_decode_var(v), _decode(bound, True), _decode(body, False))
    except NotACodeError:
        raise
    except ValueError as e:
        raise NotACodeError(f"{c} is not a code: {e}") from None


def goedel_decode(c: int) -> Formula:
    """Inverse of goedel_encode on formulas; raises NotACodeError otherwise."""
    if not isinstance(c, int) or c < 0:
        raise NotACodeError(f"{c!r} is not a natural number")
    return _decode(_big(c), False)


class CodingPolicy(Protocol):
    def __call__(self, f: Formula) -> int: ...


default_coding: CodingPolicy = goedel_encode
