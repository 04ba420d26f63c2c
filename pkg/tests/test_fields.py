import itertools

import pytest
from hypothesis import given, strategies as st

import oracles
from sigmatorus.errors import SigmaTorusError
from sigmatorus.fields import (QQ, GaloisField, field_from_json, fp_gcd, fp_is_irreducible,
                               fp_is_square, fp_is_squarefree, fp_mul)

FIELDS = [GaloisField(2), GaloisField(3), GaloisField(5), GaloisField(2, 3), GaloisField(3, 2)]


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms(F):
    els = list(F.elements())
    assert len(els) == F.q
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.sub(F.add(a, b), b) == a
    for a, b, c in itertools.islice(itertools.product(els, repeat=3), 400):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els[1:]:
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q - 1) == 1
    with pytest.raises(Exception):
        F.inv(0)


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_frobenius_and_pth_root(F):
    for a in F.elements():
        assert F.frobenius(a) == F.pow(a, F.p)
        assert F.frobenius(F.pth_root(a)) == a
        assert F.frobenius(a, F.k) == a
        assert F.trace(a) < F.p


def test_primitive_element_generates():
    for F in FIELDS:
        g = F.primitive_element()
        seen = {F.pow(g, i) for i in range(F.q - 1)}
        assert len(seen) == F.q - 1


@pytest.mark.parametrize("F, d", [(GaloisField(3), 2), (GaloisField(2, 2), 2), (GaloisField(3, 2), 3)])
def test_extend_is_homomorphism(F, d):
    big, emb = F.extend(d)
    assert big.q == F.q ** d
    assert len(set(emb.values())) == F.q
    for a, b in itertools.product(F.elements(), repeat=2):
        assert emb[F.add(a, b)] == big.add(emb[a], emb[b])
        assert emb[F.mul(a, b)] == big.mul(emb[a], emb[b])


def test_constructor_errors():
    with pytest.raises(SigmaTorusError, match="prime"):
        GaloisField(4)
    with pytest.raises(SigmaTorusError):
        GaloisField(2, 2, modulus=[1, 0, 1])       # x²+1 = (x+1)² over F2
    with pytest.raises(SigmaTorusError):
        GaloisField(3, 0)


def test_json_roundtrip():
    for F in FIELDS + [QQ]:
        assert field_from_json(F.to_json()) == F


def _all_monic(F, d):
    for tail in itertools.product(range(F.q), repeat=d):
        yield list(tail) + [1]


@pytest.mark.parametrize("F, dmax", [(GaloisField(2), 6), (GaloisField(3), 4), (GaloisField(2, 2), 3)],
                         ids=repr)
def test_irreducible_count_matches_gauss(F, dmax):
    for d in range(1, dmax + 1):
        got = sum(fp_is_irreducible(F, f) for f in _all_monic(F, d))
        assert got == oracles.count_monic_irreducibles(F.q, d)


@pytest.mark.parametrize("F", [GaloisField(3), GaloisField(5), GaloisField(3, 2)], ids=repr)
def test_square_test_vs_enumeration(F):
    squares = set()
    for d in range(0, 3):
        for g in _all_monic(F, d):
            for lam in F.elements():
                if lam:
                    lam2 = F.mul(lam, lam)
                    squares.add(tuple(F.mul(lam2, x) for x in fp_mul(F, g, g)))
    for d in range(0, 5):
        for f in _all_monic(F, d):
            for lc in (1, F.primitive_element()):
                ff = [F.mul(lc, x) for x in f]
                assert fp_is_square(F, ff) == (tuple(ff) in squares), ff


def test_square_test_char2_refused():
    with pytest.raises(SigmaTorusError):
        fp_is_square(GaloisField(2), [1, 0, 1])


@given(st.lists(st.integers(0, 4), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_squarefree_agrees_with_gcd(coeffs):
    F = GaloisField(5)
    sq = fp_mul(F, coeffs, coeffs)
    assert not fp_is_squarefree(F, sq)
    g = fp_gcd(F, coeffs, [1, 1])
    assert len(g) in (1, 2)


def test_rationals_field():
    from fractions import Fraction
    assert QQ.char == 0
    assert QQ.mul(Fraction(2, 3), QQ.inv(Fraction(2, 3))) == 1
    assert QQ.frobenius(Fraction(5, 7), 3) == Fraction(5, 7)
