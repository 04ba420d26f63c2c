"""Dense univariate polynomials over Q as ascending tuples of Fractions.

The zero polynomial is the empty tuple.  These helpers are the exact
arithmetic layer under the Laurent, Smith-form and modularity code.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

QPoly = tuple  # tuple[Fraction, ...]


def qp(coeffs: Sequence) -> QPoly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def deg(f: QPoly) -> int:
    return len(f) - 1


def add(f: QPoly, g: QPoly) -> QPoly:
    n = max(len(f), len(g))
    return qp([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def neg(f: QPoly) -> QPoly:
    return tuple(-c for c in f)


def sub(f: QPoly, g: QPoly) -> QPoly:
    return add(f, neg(g))


def scale(f: QPoly, c) -> QPoly:
    return qp([c * a for a in f])


def mul(f: QPoly, g: QPoly) -> QPoly:
    if not f or not g:
        return ()
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return qp(out)


def divmod_(f: QPoly, g: QPoly) -> tuple[QPoly, QPoly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 0)
    lg = g[-1]
    while len(r) >= len(g) and r:
        c = r[-1] / lg
        shift = len(r) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] -= c * b
        while r and r[-1] == 0:
            r.pop()
    return qp(q), qp(r)


def rem(f: QPoly, g: QPoly) -> QPoly:
    return divmod_(f, g)[1]


def monic(f: QPoly) -> QPoly:
    if not f:
        return f
    return scale(f, 1 / f[-1])


def gcd_(f: QPoly, g: QPoly) -> QPoly:
    """Monic gcd (zero if both are zero)."""
    while g:
        f, g = g, rem(f, g)
    return monic(f)


def derivative(f: QPoly) -> QPoly:
    return qp([i * f[i] for i in range(1, len(f))])


def evaluate(f: QPoly, x):
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def powmod(base: QPoly, e: int, modulus: QPoly) -> QPoly:
    result: QPoly = (Fraction(1),)
    base = rem(base, modulus)
    while e:
        if e & 1:
            result = rem(mul(result, base), modulus)
        base = rem(mul(base, base), modulus)
        e >>= 1
    return rem(result, modulus)


def to_primitive_int(f: QPoly) -> tuple[int, ...]:
    """Clear denominators and content; leading coefficient made positive."""
    if not f:
        return ()
    den = 1
    for c in f:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in f]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def squarefree_part(f: QPoly) -> QPoly:
    if deg(f) < 1:
        return monic(f)
    return monic(divmod_(f, gcd_(f, derivative(f)))[0])
