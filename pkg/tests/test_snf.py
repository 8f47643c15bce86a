"""Smith normal form against sympy as an external oracle."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from sl2dyadic.errors import Overflow
from sl2dyadic.snf import GroupPresentation, invariant_factors, row_basis, smith_normal_form


def mat_mul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def sympy_factors(A):
    return [int(x) for x in sympy_invariants(Matrix(A), domain=ZZ) if x != 0]


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-40, 40), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=300)
@given(matrices)
def test_against_sympy(A):
    D, P, Q = smith_normal_form(A, track_left=True)
    assert mat_mul(mat_mul(P, A), Q) == D
    k = min(len(A), len(A[0]))
    diag = [D[i][i] for i in range(k)]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert invariant_factors(A) == sympy_factors(A)


def test_known_examples():
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert invariant_factors([[4]]) == [4]
    assert invariant_factors([[2, 0], [0, 3]]) == [1, 6]


def test_row_basis_preserves_lattice():
    rng = random.Random(1)
    for _ in range(50):
        rows = [[rng.randrange(-9, 10) for _ in range(3)] for _ in range(7)]
        basis = row_basis(rows, 3)
        assert sympy_factors(rows) == sympy_factors(basis)


def test_presentation_z2_x_z4():
    pres = GroupPresentation(["a", "b"], [[2, 0], [0, 4], [2, 4]])
    assert pres.order == 8 and pres.cyclic_factors == [2, 4]
    assert pres.generator_orders() == [2, 4]
    chars = pres.characters()
    assert len(chars) == 8 and len(set(chars)) == 8
    assert (Fraction(0), Fraction(0)) in chars
    for phi in chars:
        # each relation is sent to 0 in Q/Z
        for rel in pres.relations:
            assert sum(r * p for r, p in zip(rel, phi)) % 1 == 0


def test_presentation_mixed_generators():
    # Z/8 generated by x with y = 2x written as a second generator
    pres = GroupPresentation(["x", "y"], [[8, 0], [2, -1]])
    assert pres.order == 8
    assert pres.generator_orders() == [8, 4]
    assert len(pres.characters()) == 8


def test_presentation_infinite_and_cap():
    with pytest.raises(ValueError):
        GroupPresentation(["x", "y"], [[2, 0]])
    with pytest.raises(Overflow):
        GroupPresentation(["x"], [[1 << 20]]).characters(cap=1 << 10)
