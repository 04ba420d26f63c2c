"""Dynamics of a rational matrix on directions of R^n.

``near_returns`` lists the times m at which A^m γ/‖A^m γ‖ comes back
within ε of γ.  ``find_recurrent_direction`` produces such a γ with a
certificate, and ``eigenvalue_power_of_p`` decides exactly whether some
power A^j has an eigenvalue p^m.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import linalg, qpoly
from .errors import SigmaTorusError, SingularMatrixError
from .laurent import IntPoly, check_prime_or_zero, factor_rational

log = logging.getLogger(__name__)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Budgets:
    j_max: int = 12
    orbit_steps: int = 10_000
    samples: int = 64
    return_horizon: int = 64

    def scaled(self, r: float) -> "Budgets":
        return Budgets(max(1, int(self.j_max * r)), max(1, int(self.orbit_steps * r)),
                       max(1, int(self.samples * r)), max(2, int(self.return_horizon * r)))


@dataclass(frozen=True)
class Direction:
    vector: tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise SigmaTorusError("zero vector has no direction")
        object.__setattr__(self, "vector", tuple(float(x) for x in v / nrm))

    def as_array(self) -> np.ndarray:
        return np.array(self.vector)


@dataclass
class RecurrenceWitness:
    direction: Direction
    epsilon: float
    return_times: list[int]
    method: str                       # dominant-real | complex-pair | orbit-scan
    status: str = "found"             # found | budget-exhausted
    best_distance: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "direction": list(self.direction.vector),
            "epsilon": self.epsilon,
            "return_times": list(self.return_times),
            "method": self.method,
            "status": self.status,
        }
        if self.best_distance is not None:
            out["best_distance"] = self.best_distance
        return out


def _as_fraction_matrix(A) -> list[list[Fraction]]:
    return linalg.to_fraction_matrix([[Fraction(str(x)) if isinstance(x, str) else Fraction(x)
                                       for x in row] for row in A])


def _float_matrix(A) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in _as_fraction_matrix(A)], dtype=float)


def _check_invertible(A) -> None:
    if linalg.det(_as_fraction_matrix(A)) == 0:
        raise SingularMatrixError("matrix is singular")


def _distances(Af: np.ndarray, gamma: np.ndarray, steps: int) -> np.ndarray:
    """‖A^m γ/‖A^m γ‖ - γ‖ for m = 1..steps, renormalizing every step."""
    target = gamma / np.linalg.norm(gamma)
    x = target.copy()
    out = np.empty(steps)
    for m in range(steps):
        x = Af @ x
        x /= np.linalg.norm(x)
        out[m] = np.linalg.norm(x - target)
    return out


def near_returns(A, gamma: Sequence[float] | Direction, eps: float, M: int) -> list[int]:
    """All m ≤ M with ‖A^m γ/‖A^m γ‖ - γ/‖γ‖‖ < eps."""
    if eps <= 0 or M < 1:
        raise SigmaTorusError("need eps > 0 and M >= 1")
    _check_invertible(A)
    g = gamma.as_array() if isinstance(gamma, Direction) else np.asarray(gamma, dtype=float)
    d = _distances(_float_matrix(A), g, M)
    return [m + 1 for m in np.flatnonzero(d < eps).tolist()]


def _continued_fraction_denominators(x: float, bound: int) -> list[int]:
    dens, h0, h1 = [], 0, 1
    k0, k1 = 1, 0
    y = x
    for _ in range(64):
        a = int(np.floor(y))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > bound:
            break
        if k1 > 0:
            dens.append(k1)
        frac = y - a
        if frac < 1e-13:
            break
        y = 1.0 / frac
    return dens


def _warn_if_reducible(A) -> None:
    try:
        chi = linalg.charpoly(_as_fraction_matrix(A))
        g = IntPoly(qpoly.to_primitive_int(chi))
        facs = factor_rational(g)
        if len(facs) > 1 or facs[0][1] > 1:
            log.warning("characteristic polynomial of A is reducible; the recurrence search assumes it is irreducible")
    except (ValueError, ZeroDivisionError):
        pass


def find_recurrent_direction(A, eps: float, budgets: Budgets = Budgets(), seed: int = 0) -> RecurrenceWitness:
    """Find a direction γ that returns within ε under infinitely many A^m.

    Strategy ladder: a strictly dominant real eigenvector, then the
    invariant plane of a dominant complex pair with return times from
    continued-fraction convergents of the rotation angle, then a scan of
    sampled orbits.  Every return time is re-verified by ``near_returns``.
    """
    _check_invertible(A)
    _warn_if_reducible(A)
    Af = _float_matrix(A)
    n = Af.shape[0]
    vals, vecs = np.linalg.eig(Af)
    mods = np.abs(vals)
    top = mods.max()
    lead = np.flatnonzero(np.abs(mods - top) <= 1e-9 * top)

    if len(lead) == 1 and abs(vals[lead[0]].imag) <= 1e-12 * top:
        v = np.real(vecs[:, lead[0]])
        v = _canonical_sign(v)
        times = near_returns(A, v, eps, budgets.return_horizon)
        if times:
            return RecurrenceWitness(Direction(tuple(v)), eps, times, "dominant-real")

    if len(lead) == 2 and abs(vals[lead[0]] - np.conj(vals[lead[1]])) <= 1e-9 * top \
            and abs(vals[lead[0]].imag) > 1e-12 * top:
        i = lead[0] if vals[lead[0]].imag > 0 else lead[1]
        w = vecs[:, i]
        v = np.real(w) if np.linalg.norm(np.real(w)) > 1e-8 else np.imag(w)
        v = _canonical_sign(v)
        theta = (np.angle(vals[i]) / (2 * np.pi)) % 1.0
        frac = Fraction(theta).limit_denominator(budgets.orbit_steps)
        if abs(float(frac) - theta) < 1e-12:
            q = frac.denominator
            horizon = min(budgets.orbit_steps, q * budgets.return_horizon)
            candidates = list(range(q, horizon + 1, q))
        else:
            candidates = _continued_fraction_denominators(theta, budgets.orbit_steps)
        if candidates:
            verified = set(near_returns(A, v, eps, max(candidates)))
            times = [m for m in candidates if m in verified]
            if times:
                return RecurrenceWitness(Direction(tuple(v)), eps, times, "complex-pair")

    return _orbit_scan(A, Af, n, eps, budgets, seed)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def _orbit_scan(A, Af, n, eps, budgets, seed) -> RecurrenceWitness:
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(n, budgets.samples))
    starts /= np.linalg.norm(starts, axis=0)
    X = starts.copy()
    counts = np.zeros(budgets.samples, dtype=int)
    best = np.full(budgets.samples, np.inf)
    for _ in range(budgets.orbit_steps):
        X = Af @ X
        X /= np.linalg.norm(X, axis=0)
        d = np.linalg.norm(X - starts, axis=0)
        counts += d < eps
        np.minimum(best, d, out=best)
    order = sorted(range(budgets.samples), key=lambda i: (-counts[i], best[i], i))
    i = order[0]
    gamma = Direction(tuple(starts[:, i]))
    if counts[i] == 0:
        return RecurrenceWitness(gamma, eps, [], "orbit-scan", status="budget-exhausted",
                                 best_distance=float(best[i]))
    times = near_returns(A, gamma, eps, budgets.orbit_steps)
    if not times:
        return RecurrenceWitness(gamma, eps, [], "orbit-scan", status="budget-exhausted",
                                 best_distance=float(best[i]))
    return RecurrenceWitness(gamma, eps, times, "orbit-scan")


# ---------------------------------------------------------------------------
# exact power-of-p eigenvalues


def _exponent_window(B, p: int) -> tuple[int, int]:
    """Integers m_lo ≤ m_hi bracketing every possible p^m eigenvalue of B."""
    n = len(B)
    upper = linalg.row_sum_norm(B) * n
    lower = 1 / (linalg.row_sum_norm(linalg.inverse(B)) * n)
    hi = 0
    while Fraction(p) ** hi < upper:
        hi += 1
    lo = 0
    while Fraction(p) ** lo > lower:
        lo -= 1
    return lo, hi


def power_of_p_exponents(A, p: int, j: int) -> list[int]:
    """All m with charpoly(A^j)(p^m) = 0, ordered by |m| then sign."""
    B = linalg.matpow(_as_fraction_matrix(A), j)
    chi = linalg.charpoly(B)
    lo, hi = _exponent_window(B, p)
    hits = [m for m in range(lo, hi + 1) if qpoly.evaluate(chi, Fraction(p) ** m) == 0]
    return sorted(hits, key=lambda m: (abs(m), -m))


def eigenvalue_power_of_p(A, p: int, j_max: int = 12) -> Optional[tuple[int, int]]:
    """Smallest j ≤ j_max (and its m) such that A^j has eigenvalue p^m."""
    check_prime_or_zero(p)
    if p == 0:
        raise SigmaTorusError("p must be prime")
    _check_invertible(A)
    for j in range(1, j_max + 1):
        hits = power_of_p_exponents(A, p, j)
        if hits:
            return (j, hits[0])
    return None
