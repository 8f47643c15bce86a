"""Truncated arithmetic against an independent oracle.

For e = 1 the oracle is Python integers modulo 2**N.  For e = 2 with
pi**2 = D it is plain pairs (a, b) meaning a + b*pi, multiplied by hand
and compared through the valuation min(2 v2(a), 2 v2(b) + 1); none of
the library's canonicalization is reused.
"""

from itertools import product

import pytest
from hypothesis import given, strategies as st

from sl2dyadic import FracElem, make_field, q2, sqrt2_field
from sl2dyadic.errors import NotAUnit, NotEisenstein, PrecisionMismatch, PrecisionTooSmall
from sl2dyadic.padic import AtLeast, add, divide_by_pi_power, frac_add, frac_mul, frac_val, invert_unit, mul, n_min, valuation


def v2_or_inf(x: int) -> float:
    return float("inf") if x == 0 else (x & -x).bit_length() - 1


def oracle_val(a: int, b: int) -> float:
    return min(2 * v2_or_inf(a), 2 * v2_or_inf(b) + 1)


def oracle_mul(x, y, D):
    (a, b), (c, d) = x, y
    return (a * c + D * b * d, a * d + b * c)


def oracle_eq(x, y, N) -> bool:
    return oracle_val(x[0] - y[0], x[1] - y[1]) >= N


def agrees(elem, pair, N) -> bool:
    return oracle_eq(elem.coeffs, pair, N)


# -- make_field ----------------------------------------------------------------

def test_make_field_q2():
    F = make_field(1, [-2, 1], 6)
    assert F.u.coeffs == (1,)
    assert F.pi() == F.elem(2)


def test_make_field_sqrt2():
    F = make_field(2, [-2, 0, 1], 8)
    assert F.u == F.one()


def test_make_field_sqrt6_u_is_3():
    F = make_field(2, [-6, 0, 1], 8)
    # u = 6/2 = 3, canonical a_0 modulo 2**4
    assert F.u == F.elem(3)
    assert F.u.coeffs == (3, 0)


@pytest.mark.parametrize("e, coeffs", [
    (1, [-4, 1]),        # constant term has valuation 2
    (2, [-2, 1, 1]),     # odd middle coefficient
    (2, [-2, 0, 3]),     # not monic
    (2, [-2, 1]),        # wrong length
])
def test_make_field_rejects_non_eisenstein(e, coeffs):
    with pytest.raises(NotEisenstein):
        make_field(e, coeffs, 8)


def test_make_field_precision_below_e():
    with pytest.raises(PrecisionTooSmall):
        make_field(2, [-2, 0, 1], 1)


# -- add / mul / invert / valuation examples -----------------------------------

def test_add_examples():
    F = q2(3)
    assert add(F.elem(3), F.elem(6)) == F.elem(1)
    a = F.elem(5)
    assert a + F.zero() == a


def test_add_sqrt2_pi_plus_pi():
    F = sqrt2_field(4)
    s = F.pi() + F.pi()
    assert s.coeffs == (0, 2)
    # a_1 lives modulo 2**ceil(3/2) = 4, so 3*pi + 3*pi = 6*pi reduces to 2*pi
    assert F.elem((0, 3)) + F.elem((0, 3)) == s


def test_add_precision_mismatch():
    F = q2()
    with pytest.raises(PrecisionMismatch):
        F.elem(1, 3) + F.elem(1, 4)


def test_mul_examples():
    F = q2(3)
    assert mul(F.elem(3), F.elem(3)) == F.elem(1)
    a = F.elem(7)
    assert a * F.one() == a
    G = sqrt2_field(8)
    assert G.pi() * G.pi() == G.elem(2)


def test_invert_examples():
    assert invert_unit(q2(3).elem(3)) == q2(3).elem(3)
    assert invert_unit(q2(3).one()) == q2(3).one()
    assert invert_unit(q2(4).elem(5)) == q2(4).elem(13)


def test_invert_non_unit():
    with pytest.raises(NotAUnit):
        invert_unit(q2(4).elem(2))


def test_valuation_examples():
    assert valuation(q2(6).elem(4)) == 2
    assert valuation(sqrt2_field(8).elem(2)) == 2
    assert valuation(q2(5).zero()) == AtLeast(5)


def test_two_has_valuation_e(F1, F2, F6):
    for F in (F1, F2, F6):
        assert F.elem(2).valuation() == F.e
        assert F.u.valuation() == 0


def test_n_min():
    assert n_min(1, 0, 0, 1) == 2 + 1 + 1 + 1
    assert n_min(2, 2, 1, 2) == 4 + 2 + 2 + 1
    assert n_min(1, -1, -1, 1) == 5


# -- FracElem ------------------------------------------------------------------

def test_frac_examples():
    F = q2(8)
    half = FracElem.make(F, 1, 1, 6)
    s = frac_add(half, half)
    # 2/pi is the integer 1 once normalized
    assert s.shift == 0 and s.num.reduce(6) == F.elem(1, 6)
    quarter = FracElem.make(F, 1, 2, 6)
    assert frac_val(quarter) == -2
    x = FracElem(F.elem(3, 8))
    p = frac_mul(x, quarter)
    assert p.shift == 2 and p.num.coeffs == (3,)


def test_frac_sqrt2_shift_not_reduced_by_units():
    F = sqrt2_field(8)
    x = FracElem.make(F, 1, 1, 5)
    y = x + x
    # 2/pi = pi is integral with valuation 1
    assert y.shift == 0 and y.valuation() == 1


def test_frac_precision_is_tracked():
    F = q2(8)
    x = FracElem.make(F, 1, 3, 2)   # 1/8 known modulo 4
    y = FracElem.make(F, 1, 0, 6)
    assert (x + y).abs_prec == 2


def test_divide_by_pi_power_exact():
    F = sqrt2_field(10)
    x = F.elem(6)   # 6 = 3 * pi^2
    q = divide_by_pi_power(x, 2)
    assert q.prec == 8 and q == F.elem(3, 8)


# -- exhaustive ring axioms at tiny precision -----------------------------------

@pytest.mark.parametrize("F", [q2(4), sqrt2_field(4), make_field(2, [-6, 0, 1], 4)],
                         ids=["q2", "sqrt2", "sqrt6"])
@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_ring_axioms_exhaustive(F, N):
    elems = list(F.residues(N))
    # |o/p^N| = 2^N
    assert len(elems) == 1 << N and len(set(elems)) == len(elems)
    for a, b in product(elems, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
    sample = elems[:8] if len(elems) > 8 else elems
    for a, b, c in product(sample, elems, elems):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("F", [q2(4), sqrt2_field(4)], ids=["q2", "sqrt2"])
@pytest.mark.parametrize("N", [2, 3, 4])
def test_invert_exhaustive(F, N):
    one = F.one(N)
    units = [a for a in F.residues(N) if a.is_unit()]
    assert len(units) == 1 << (N - 1)
    for a in units:
        assert invert_unit(a) * a == one


def test_canonicalize_idempotent():
    F = sqrt2_field(5)
    for a0, a1 in product(range(-20, 20), repeat=2):
        x = F.elem((a0, a1))
        assert F.elem(x.coeffs) == x and F.elem(x.coeffs).coeffs == x.coeffs


# -- property tests against the oracle ------------------------------------------

coeff = st.integers(min_value=-(1 << 20), max_value=1 << 20)


@given(st.tuples(coeff, coeff), st.tuples(coeff, coeff), st.integers(2, 14), st.sampled_from([2, 6]))
def test_oracle_agreement_e2(x, y, N, D):
    F = make_field(2, [-D, 0, 1], N)
    X, Y = F.elem(x), F.elem(y)
    assert agrees(X + Y, (x[0] + y[0], x[1] + y[1]), N)
    assert agrees(X * Y, oracle_mul(x, y, D), N)
    assert agrees(-X, (-x[0], -x[1]), N)


@given(coeff, coeff, st.integers(1, 20))
def test_oracle_agreement_q2(x, y, N):
    F = q2(N)
    assert (F.elem(x) * F.elem(y)).coeffs == ((x * y) % (1 << N),)
    assert (F.elem(x) + F.elem(y)).coeffs == ((x + y) % (1 << N),)


@given(st.tuples(coeff, coeff), st.integers(2, 14), st.sampled_from([2, 6]))
def test_valuation_matches_oracle(x, N, D):
    F = make_field(2, [-D, 0, 1], N)
    v = F.elem(x).valuation()
    ov = oracle_val(*x)
    if ov >= N:
        assert isinstance(v, AtLeast)
    else:
        assert v == ov


@given(st.tuples(coeff, coeff), st.tuples(coeff, coeff), st.integers(2, 16))
def test_valuation_multiplicative(x, y, N):
    F = sqrt2_field(N)
    X, Y = F.elem(x), F.elem(y)
    vx, vy = X.valuation(), Y.valuation()
    if isinstance(vx, int) and isinstance(vy, int) and vx + vy < N:
        assert (X * Y).valuation() == vx + vy


@given(st.tuples(coeff, coeff), st.integers(2, 16), st.sampled_from([2, 6]))
def test_inverse_property(x, N, D):
    F = make_field(2, [-D, 0, 1], N)
    X = F.elem((2 * x[0] + 1, x[1]))
    Y = invert_unit(X)
    assert X * Y == F.one(N)
    assert agrees(X * Y, (1, 0), N) and oracle_eq(oracle_mul(X.coeffs, Y.coeffs, D), (1, 0), N)


@given(st.tuples(coeff, coeff), st.integers(0, 6), st.integers(6, 14))
def test_frac_roundtrip(x, k, N):
    F = sqrt2_field(N + k)
    num = F.elem(x, N)
    f = FracElem(num, k)
    # multiplying back by pi^k returns the numerator at the retained precision
    back = f * FracElem(F.pi_power(k, N + k))
    assert back.shift == 0
    P = min(back.num.prec, N)
    assert back.num.reduce(P) == num.reduce(P)
