"""Exponent groups Γ ⊂ R of finite rank with an exact order.

An exponent is a rational coordinate vector against weights w_1..w_r.
Weights are exact rationals or real algebraic numbers given by an
integer minimal polynomial and an isolating interval.  The sign of
Σ q_i w_i is decided by the declared Q-linear independence (zero iff the
algebraic coordinates vanish) plus bisection of the isolating intervals.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence, Union

from .errors import PrecisionCapExceeded, SigmaTorusError

DEFAULT_CAP_BITS = 512

_stats_lock = threading.Lock()
_max_bits_used = 0


def precision_cap() -> int:
    return int(os.environ.get("SIGMATORUS_PRECISION_BITS", DEFAULT_CAP_BITS))


def max_bits_used() -> int:
    return _max_bits_used


def reset_bits_stat() -> None:
    global _max_bits_used
    with _stats_lock:
        _max_bits_used = 0


def _note_bits(bits: int) -> None:
    global _max_bits_used
    with _stats_lock:
        _max_bits_used = max(_max_bits_used, bits)


def _eval(poly: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


class AlgebraicReal:
    """Real root of an integer polynomial, isolated in (lo, hi).

    The polynomial must be squarefree and change sign across the interval
    with exactly one root inside.  Refinement state is shared and guarded
    by a lock, so concurrent comparisons are safe.
    """

    def __init__(self, minpoly: Sequence[int], lo, hi):
        self.minpoly = tuple(int(c) for c in minpoly)
        lo, hi = Fraction(lo), Fraction(hi)
        if not lo < hi:
            raise SigmaTorusError("isolating interval must have lo < hi")
        flo, fhi = _eval(self.minpoly, lo), _eval(self.minpoly, hi)
        if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
            raise SigmaTorusError("minimal polynomial must change sign strictly inside the interval")
        from sympy import Poly, Rational, Symbol
        x = Symbol("x")
        if Poly(list(reversed(self.minpoly)), x).count_roots(Rational(lo), Rational(hi)) != 1:
            raise SigmaTorusError("interval does not isolate a single root")
        self._lo, self._hi = lo, hi
        self._lo_sign = flo > 0
        self._bits = 0
        self._lock = threading.Lock()

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        if bits > precision_cap():
            raise PrecisionCapExceeded(
                f"refinement beyond {precision_cap()} bits; weights are probably Q-linearly dependent")
        with self._lock:
            while self._bits < bits:
                mid = (self._lo + self._hi) / 2
                fm = _eval(self.minpoly, mid)
                if fm == 0:
                    # exact rational root: collapse the interval
                    self._lo = self._hi = mid
                    self._bits = 10 ** 9
                    break
                if (fm > 0) == self._lo_sign:
                    self._lo = mid
                else:
                    self._hi = mid
                self._bits += 1
            _note_bits(min(bits, self._bits))
            return self._lo, self._hi

    def __float__(self):
        lo, hi = self.interval(60)
        return float((lo + hi) / 2)

    def to_json(self):
        return {"minpoly": list(self.minpoly), "interval": [str(self._lo), str(self._hi)]}

    def __repr__(self):
        return f"AlgebraicReal({self.minpoly}, ≈{float(self):.12g})"


Weight = Union[Fraction, AlgebraicReal]


def weight_from_json(obj) -> Weight:
    if isinstance(obj, dict):
        lo, hi = obj["interval"]
        return AlgebraicReal(obj["minpoly"], Fraction(str(lo)), Fraction(str(hi)))
    return Fraction(str(obj))


class ExponentGroup:
    """Γ = (1/d)·Z-span of Q-linearly independent real weights."""

    def __init__(self, weights: Sequence, d: int = 1):
        if d < 1:
            raise SigmaTorusError("denominator scale must be >= 1")
        self.weights = tuple(w if isinstance(w, AlgebraicReal) else Fraction(w) for w in weights)
        if not self.weights:
            raise SigmaTorusError("rank must be >= 1")
        self.d = int(d)

    @classmethod
    def integers(cls, d: int = 1) -> "ExponentGroup":
        return cls([1], d)

    @classmethod
    def from_direction(cls, direction: Sequence[float], d: int = 1) -> "ExponentGroup":
        """Weights from a floating direction, converted exactly to dyadic rationals.

        Q-linear independence cannot hold for rational weights of rank > 1;
        comparisons stay exact but distinct coordinates may tie.
        """
        return cls([Fraction(float(x)) for x in direction], d)

    @property
    def rank(self) -> int:
        return len(self.weights)

    def exponent(self, *coords) -> "Exponent":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) != self.rank:
            raise SigmaTorusError(f"expected {self.rank} coordinates, got {len(coords)}")
        coords = tuple(Fraction(c) for c in coords)
        if not self.in_lattice(coords):
            raise SigmaTorusError(f"exponent {list(map(str, coords))} is not in (1/{self.d})·Z^{self.rank}")
        return Exponent(self, coords)

    def zero(self) -> "Exponent":
        return Exponent(self, (Fraction(0),) * self.rank)

    def in_lattice(self, coords: Sequence[Fraction]) -> bool:
        return all((c * self.d).denominator == 1 for c in coords)

    def sign(self, coords: Sequence[Fraction]) -> int:
        exact = Fraction(0)
        alg = []
        for q, w in zip(coords, self.weights):
            if q == 0:
                continue
            if isinstance(w, AlgebraicReal):
                alg.append((q, w))
            else:
                exact += q * w
        if not alg:
            return (exact > 0) - (exact < 0)
        bits = 16
        while True:
            lo = hi = exact
            for q, w in alg:
                a, b = w.interval(bits)
                if q > 0:
                    lo += q * a
                    hi += q * b
                else:
                    lo += q * b
                    hi += q * a
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def approx(self, coords: Sequence[Fraction]) -> float:
        return sum(float(q) * float(w) for q, w in zip(coords, self.weights))

    def to_json(self) -> dict:
        return {"weights": [w.to_json() if isinstance(w, AlgebraicReal) else str(w)
                            for w in self.weights], "d": self.d}

    @classmethod
    def from_json(cls, obj) -> "ExponentGroup":
        return cls([weight_from_json(w) for w in obj["weights"]], int(obj.get("d", 1)))

    def __repr__(self):
        return f"ExponentGroup(rank={self.rank}, d={self.d})"


@total_ordering
@dataclass(frozen=True)
class Exponent:
    group: ExponentGroup
    coords: tuple[Fraction, ...]

    def _check(self, other: "Exponent"):
        if other.group is not self.group:
            raise SigmaTorusError("exponents from different groups")

    def __add__(self, other: "Exponent") -> "Exponent":
        self._check(other)
        return Exponent(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Exponent") -> "Exponent":
        self._check(other)
        return Exponent(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Exponent":
        return Exponent(self.group, tuple(-a for a in self.coords))

    def scale(self, r) -> "Exponent":
        r = Fraction(r)
        return Exponent(self.group, tuple(r * a for a in self.coords))

    def sign(self) -> int:
        return self.group.sign(self.coords)

    def __eq__(self, other):
        return isinstance(other, Exponent) and other.group is self.group and other.coords == self.coords

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other: "Exponent") -> bool:
        self._check(other)
        if self.coords == other.coords:
            return False
        return self.group.sign(tuple(a - b for a, b in zip(self.coords, other.coords))) < 0

    def divisible_by(self, p: int) -> bool:
        """Whether self/p lies in the stored (1/d)·Z lattice."""
        return all((c * self.group.d / p).denominator == 1 for c in self.coords)

    def __float__(self):
        return self.group.approx(self.coords)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    def __repr__(self):
        inner = ", ".join(str(c) for c in self.coords)
        return f"Exp({inner})"


def exp_min(a, b):
    """Minimum where None stands for +∞."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b
