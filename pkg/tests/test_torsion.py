import itertools
from math import gcd

import pytest
from hypothesis import given, strategies as st

import oracles
from sigmatorus.classify import DiffMatrix
from sigmatorus.errors import SigmaTorusError
from sigmatorus.laurent import LaurentPoly
from sigmatorus.torsion import endo_from_diffmatrix, kernel_order, phi_map, quotient_structure

s = LaurentPoly.sigma
c = LaurentPoly.const
Z = LaurentPoly()


def test_examples():
    F = DiffMatrix(((s() - c(2),),))
    q = quotient_structure(endo_from_diffmatrix(F, 3, 1))
    assert q.elementary_divisors == [] and q.order == 1 and q.index_equals_kernel
    q = quotient_structure(endo_from_diffmatrix(F, 3, 2))
    assert q.elementary_divisors == [3] and q.kernel_order == 3

    F = DiffMatrix(((s(), c(1)), (Z, s())))
    e = endo_from_diffmatrix(F, 4, 3)
    assert e.matrix == ((3, 1), (0, 3))
    assert quotient_structure(e).order == 1


def test_gcd_error():
    with pytest.raises(SigmaTorusError, match="gcd"):
        endo_from_diffmatrix(DiffMatrix(((s(),),)), 4, 2)


def test_negative_powers_use_inverse():
    e = endo_from_diffmatrix(DiffMatrix(((s(-1),),)), 5, 2)
    assert e.matrix == ((3,),)


entry = st.dictionaries(st.integers(-2, 2), st.integers(-3, 3), max_size=3).map(LaurentPoly)


@given(st.integers(2, 6), st.data())
def test_coker_equals_kernel_exhaustive(n, data):
    k = data.draw(st.integers(1, 2))
    F = DiffMatrix(tuple(tuple(data.draw(entry) for _ in range(k)) for _ in range(k)))
    units = [u for u in range(1, n) if gcd(u, n) == 1]
    sv = data.draw(st.sampled_from(units))
    e = endo_from_diffmatrix(F, n, sv)
    q = quotient_structure(e)
    kern, coker = oracles.brute_kernel_and_coker([list(r) for r in e.matrix], n)
    assert q.order == coker
    assert q.kernel_order == kern == kernel_order(e)
    assert q.index_equals_kernel


def _phi_domain(e):
    n, k = e.base.n, e.base.k
    n2 = n * n
    out = []
    for x in itertools.product(range(n), repeat=k):
        a = tuple(n * xi for xi in x)
        if not any(e.apply(a, n2)):
            out.append(a)
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("F", [
    DiffMatrix(((s() - c(2),),)),
    DiffMatrix(((s() - c(1),),)),
    DiffMatrix(((s(), c(1)), (Z, s() - c(1)))),
    DiffMatrix(((s() + c(1), c(2)), (c(2), s() - c(1)))),
])
def test_phi_is_homomorphism(n, F):
    n2 = n * n
    for sv in range(1, n):
        if gcd(sv, n) != 1:
            continue
        e = endo_from_diffmatrix(F, n, sv)
        dom = _phi_domain(e)
        q = quotient_structure(e)
        img = {a: phi_map(e, a) for a in dom}
        for a, b in itertools.product(dom, repeat=2):
            ab = tuple((x + y) % n2 for x, y in zip(a, b))
            want = tuple((x + y) % d for x, y, d in zip(img[a], img[b], q.elementary_divisors))
            assert img[ab] == want
        zero = tuple(0 for _ in q.elementary_divisors)
        assert img[tuple(0 for _ in range(e.base.k))] == zero


def test_phi_rejects_outside_domain():
    e = endo_from_diffmatrix(DiffMatrix(((s() - c(2),),)), 3, 2)
    with pytest.raises(SigmaTorusError):
        phi_map(e, (1,))
    with pytest.raises(SigmaTorusError):
        phi_map(e, (0, 0))


@given(st.integers(2, 5), st.data())
def test_basis_change_invariance(n, data):
    """Conjugating by an invertible integer matrix leaves the quotient unchanged."""
    M = [[data.draw(st.integers(-4, 4)) for _ in range(2)] for _ in range(2)]
    P = data.draw(st.sampled_from([[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]]]))
    Pinv = {((1, 1), (0, 1)): [[1, -1], [0, 1]], ((0, 1), (1, 0)): [[0, 1], [1, 0]],
            ((2, 1), (1, 1)): [[1, -1], [-1, 2]]}[tuple(map(tuple, P))]

    def mm(A, B):
        return [[sum(A[i][t] * B[t][j] for t in range(2)) for j in range(2)] for i in range(2)]

    M2 = mm(mm(P, M), Pinv)
    a = quotient_structure(endo_from_diffmatrix(DiffMatrix(tuple(tuple(c(x) for x in r) for r in M)), n, 1))
    b = quotient_structure(endo_from_diffmatrix(DiffMatrix(tuple(tuple(c(x) for x in r) for r in M2)), n, 1))
    assert a.elementary_divisors == b.elementary_divisors
