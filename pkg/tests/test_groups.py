"""Filtration subgroups, coset systems, theta and normality.

Over Q_2 the coset machinery is compared with a brute-force oracle that
lists SL_2(Z/2^L) with nested integer loops and tests the congruences
with integer valuations.
"""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl2dyadic import (
    B_n,
    G,
    K,
    K_n,
    K_n_m,
    AdditiveQuotientElem,
    Mat2,
    conjugate_intersection_check,
    enumerate_cosets,
    membership,
    normality_check,
    q2,
    sqrt2_field,
    theta,
    theta_inverse,
)
from sl2dyadic.errors import NotASubgroup, Overflow, PrecisionTooSmall, ShapeViolation
from sl2dyadic.groups import closure_check, theta_hom_check
from sl2dyadic.report import OUTSIDE


def M(F, rows, prec=None):
    return Mat2.from_ints(F, rows, prec)


def val2(x: int, cap: int) -> int:
    return cap if x == 0 else min(cap, (x & -x).bit_length() - 1)


def brute_sl2(L: int):
    mod = 1 << L
    return [(a, b, c, d) for a, b, c, d in product(range(mod), repeat=4) if (a * d - b * c) % mod == 1]


def brute_member(x, bounds, L):
    a, b, c, d = x
    mod = 1 << L
    entries = ((a - 1) % mod, b, c, (d - 1) % mod)
    return all(val2(v, L) >= max(k, 0) for v, k in zip(entries, bounds))


@pytest.fixture(scope="module")
def sl2_mod8():
    return brute_sl2(3)


# -- membership ------------------------------------------------------------------

def test_membership_examples():
    F = q2(4)
    I = Mat2.identity(F)
    for S in (K(), K_n(1), K_n(3), B_n(2), K_n_m(1, 1), G(1, -1, 0), G(2, 1, 1)):
        assert membership(I, S)
    U = M(F, ((1, 1), (0, 1)))
    assert membership(U, B_n(1))
    assert not membership(U, K_n(1))
    Y = M(F, ((3, 4), (4, 11)))
    assert membership(Y, K_n_m(1, 1))
    assert not membership(M(F, ((3, 2), (2, 7))), K_n_m(1, 1))


def test_membership_precision():
    with pytest.raises(PrecisionTooSmall):
        membership(Mat2.identity(q2(2), 2), K_n_m(2, 1))


def test_membership_det_must_be_one():
    F = q2(6)
    assert not membership(M(F, ((3, 0), (0, 1))), K())


def test_group_property_flags():
    assert G(1, -1, 0).is_group() and G(1, 0, -1).is_group()
    assert not G(1, -1, -1).is_group()


def test_closure():
    F = q2(8)
    for S in (K_n_m(1, 1), G(1, -1, 0), G(1, 0, 1), B_n(2)):
        assert closure_check(F, S, level=3).passed
    r = closure_check(F, G(1, -1, -1), level=3)
    assert not r.checks["product"]
    assert closure_check(sqrt2_field(8), G(1, 2, 1), level=4).passed


# -- coset systems ------------------------------------------------------------------

def test_coset_trivial(F1):
    cs = enumerate_cosets(F1, K_n(1), K_n(1))
    assert cs.index == 1
    assert cs.representatives[0] == Mat2.identity(F1, 1)


def test_coset_examples(F1):
    assert enumerate_cosets(F1, G(1, 0, 0), G(2, 0, 0)).index == 8
    assert enumerate_cosets(F1, K(), K_n(1)).index == 6


def test_coset_errors(F1):
    with pytest.raises(NotASubgroup):
        enumerate_cosets(F1, K_n(2), K_n(1))
    with pytest.raises(Overflow):
        enumerate_cosets(F1, K(), K_n(3), cap=10)


@pytest.mark.parametrize("S, T", [
    (K(), K_n(1)), (K(), K_n(2)), (K(), B_n(2)), (B_n(1), K_n(2)),
    (K_n(1), K_n_m(1, 1)), (G(1, -1, 0), G(2, -1, 0)), (K_n(1), K_n(3)),
])
def test_coset_index_against_brute_force(F1, sl2_mod8, S, T):
    L = 3
    cs = enumerate_cosets(F1, S, T)
    Sb = [x for x in sl2_mod8 if brute_member(x, S.bounds(), L)]
    Tb = [x for x in sl2_mod8 if brute_member(x, T.bounds(), L)]
    assert cs.index == len(Sb) // len(Tb)
    # representatives lie in S and sit in pairwise distinct cosets
    mod = 1 << cs.level
    reps = [tuple(int(x.coeffs[0]) for x in r.entries) for r in cs.representatives]
    assert len(set(reps)) == cs.index
    for r in reps:
        assert brute_member(r, S.bounds(), cs.level)
    for (a, b, c, d), s in product(reps, repeat=2):
        if (a, b, c, d) == s:
            continue
        inv = ((d, -b), (-c, a))
        q = ((inv[0][0] * s[0] + inv[0][1] * s[2]) % mod, (inv[0][0] * s[1] + inv[0][1] * s[3]) % mod,
             (inv[1][0] * s[0] + inv[1][1] * s[2]) % mod, (inv[1][0] * s[1] + inv[1][1] * s[3]) % mod)
        assert not brute_member(q, T.bounds(), cs.level)


@pytest.mark.parametrize("params", [(1, 0, 0), (1, 1, 0), (1, -1, 1), (2, 1, 0), (1, 2, 2)])
def test_quotient_index_is_three_coordinates(F1, F2, params):
    n, m, l = params
    for F in (F1, F2):
        cs = enumerate_cosets(F, G(n, m, l), G(2 * n, m, l))
        assert cs.index == 2 ** (3 * n)


def test_locate(F2):
    cs = enumerate_cosets(F2, K_n(1), K_n(2))
    for i, r in enumerate(cs.representatives):
        assert cs.locate_matrix(r) == i
    outside = M(F2, ((0, 1), (-1, 0)), cs.level)
    assert cs.locate_matrix(outside) == -1


def test_klein_eight_table(F1):
    cs = enumerate_cosets(F1, G(1, 0, 0), G(2, 0, 0))
    T = cs.multiplication_table()
    identity = cs.locate_matrix(Mat2.identity(F1, cs.level))
    assert np.array_equal(T, T.T)
    assert all(T[i, i] == identity for i in range(8))


# -- theta -------------------------------------------------------------------------

def test_theta_examples(F1):
    F = q2(4)
    assert theta(Mat2.identity(F), 1, 0, 0) == AdditiveQuotientElem.zero(F, 1, 0, 0)
    X, Y = M(F, ((1, 2), (0, 1))), M(F, ((1, 0), (2, 1)))
    assert theta(X @ Y, 1, 0, 0) == theta(X, 1, 0, 0) + theta(Y, 1, 0, 0)
    assert theta(X.inverse(), 1, 0, 0) == -theta(X, 1, 0, 0)
    # XY = (5, 2; 2, 1): (5 - 1)/2 = 2 vanishes mod p
    assert theta(X @ Y, 1, 0, 0).key == ((0,), (1,), (1,))


def test_theta_errors():
    F = q2(4)
    with pytest.raises(ShapeViolation):
        theta(M(F, ((1, 1), (0, 1))), 1, 0, 0)
    with pytest.raises(ShapeViolation):
        theta(Mat2.identity(F), 0, 0, 0)
    with pytest.raises(PrecisionTooSmall):
        theta(Mat2.identity(q2(2), 2), 1, 1, 0)


def test_theta_inverse_examples():
    F = q2(3)
    v = AdditiveQuotientElem.zero(F, 1, 0, 0)
    assert theta_inverse(v, 3) == Mat2.identity(F, 3)
    v = AdditiveQuotientElem(F, 1, 0, 0, (1, 0, 0))
    assert theta_inverse(v, 3) == M(F, ((3, 0), (0, 3)), 3)


@pytest.mark.parametrize("F", [q2(8), sqrt2_field(8)], ids=["q2", "sqrt2"])
def test_theta_roundtrip_n1(F):
    for v in AdditiveQuotientElem.all(F, 1, 1, 0):
        X = theta_inverse(v)
        assert X.det() == F.one(X.prec)
        assert theta(X, 1, 1, 0) == v


@pytest.mark.parametrize("F, params", [(q2(8), (1, 0, 0)), (sqrt2_field(8), (1, 1, 0)),
                                       (q2(8), (1, 1, -1))])
def test_theta_hom_check(F, params):
    r = theta_hom_check(F, *params)
    assert r.passed and r.counts["elements"] == 8


def test_theta_hom_check_needs_group():
    r = theta_hom_check(q2(8), 1, -1, -1)
    assert r.verdict == OUTSIDE
    assert r.checks["closed"] is False and r.checks["observed"] is False


@settings(max_examples=200)
@given(st.data())
def test_theta_homomorphism_random(data):
    F = data.draw(st.sampled_from([q2(10), sqrt2_field(10)]))
    n, m, l = data.draw(st.sampled_from([(2, 1, 0), (1, 2, 1), (2, 0, 2), (3, 0, 0)]))
    res = list(F.residues(n))

    def draw():
        return AdditiveQuotientElem(F, n, m, l, tuple(data.draw(st.sampled_from(res)) for _ in range(3)))

    v, w = draw(), draw()
    X, Y = theta_inverse(v), theta_inverse(w)
    assert theta(X @ Y, n, m, l) == v + w
    assert theta(X.inverse(), n, m, l) == -v


# -- normality and conjugates ------------------------------------------------------

@pytest.mark.parametrize("F, n, m", [(q2(8), 1, 0), (q2(8), 1, 1), (sqrt2_field(8), 2, 2)],
                         ids=["q2-1-0", "q2-1-1", "sqrt2-2-2"])
def test_normality_examples(F, n, m):
    r = normality_check(F, n, m)
    assert r.passed, r.witnesses
    assert r.counts["failures"] == 0


def test_normality_outside_hypothesis_is_labelled():
    r = normality_check(q2(8), 2, 2)
    assert r.verdict == OUTSIDE
    # the observed outcome travels with the label: normality genuinely fails here
    assert r.checks["observed"] is False
    assert r.counts["failures"] > 0


def test_normality_sampled_records_seed():
    r = normality_check(q2(8), 2, 1, mode="sampled", samples=50, seed=7)
    assert r.params["seed"] == 7 and r.counts["g"] == 50 and r.passed
    with pytest.raises(ValueError):
        normality_check(q2(8), 1, 0, mode="bogus")


@pytest.mark.parametrize("F, n, m", [(q2(8), 1, 1), (q2(8), 2, 0), (q2(8), 1, 0),
                                     (sqrt2_field(8), 2, 1)],
                         ids=["q2-1-1", "q2-2-0", "q2-1-0", "sqrt2-2-1"])
def test_conjugate_intersection(F, n, m):
    r = conjugate_intersection_check(F, n, m)
    assert r.passed, r.witnesses
    assert r.counts["intersection"] == r.counts["K_n_m_image"]
