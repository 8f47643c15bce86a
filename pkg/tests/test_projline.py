import random
from itertools import product

import pytest

from sl2dyadic import Mat2, ProjPoint, act, canonicalize_point, points, q2, sqrt2_field, trivial_action_check, verify_stabilizer
from sl2dyadic.errors import NotPrimitive
from sl2dyadic.groups import K, K_n, enumerate_cosets
from sl2dyadic.projline import point_count, transitivity_check


def M(F, rows, prec=None):
    return Mat2.from_ints(F, rows, prec)


def test_canonicalize_examples():
    F = q2(8)
    P = canonicalize_point(F.elem(2, 2), F.elem(1, 2), 2)
    assert (P.x.coeffs, P.y.coeffs) == ((2,), (1,))
    P = canonicalize_point(F.elem(3, 3), F.elem(6, 3), 3)
    assert (P.x.coeffs, P.y.coeffs) == ((1,), (2,))
    for n in range(1, 5):
        P = ProjPoint.make(F, 1, 0, n)
        assert (P.x.coeffs, P.y.coeffs) == ((1,), (0,))


def test_canonicalize_homothety_invariant(F2):
    n = 4
    for x, y in product(F2.residues(n), repeat=2):
        if not (x.is_unit() or y.is_unit()):
            continue
        P = canonicalize_point(x, y, n)
        for s in (F2.elem(3, n), F2.elem((1, 1), n), F2.elem((5, 3), n)):
            assert canonicalize_point(x * s, y * s, n) == P


def test_canonicalize_non_primitive():
    F = q2(8)
    with pytest.raises(NotPrimitive):
        canonicalize_point(F.elem(2, 3), F.elem(4, 3), 3)


def test_level_zero_singleton():
    F = q2(8)
    assert len(points(F, 0)) == 1
    assert ProjPoint.make(F, 1, 0, 0) == ProjPoint.make(F, 0, 1, 0)


def test_act_examples(F1, F2):
    for F in (F1, F2):
        for n in (1, 2, 3):
            P = ProjPoint.make(F, 1, 0, n)
            assert act(Mat2.identity(F), P) == P
            assert act(M(F, ((0, 1), (-1, 0))), P) == ProjPoint.make(F, 0, 1, n)
        P2 = ProjPoint.make(F, 1, 0, 2)
        assert act(M(F, ((1, 1), (0, 1))), P2) == P2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_point_counts(F1, F2, n):
    assert point_count(n) == 2 ** n + 2 ** (n - 1)
    for F in (F1, F2):
        pts = points(F, n)
        assert len(pts) == len(set(pts)) == point_count(n)


@pytest.mark.parametrize("n", [1, 2])
def test_action_axioms_exhaustive_q2(F1, n):
    reps = enumerate_cosets(F1, K(), K_n(n)).lifted(8)
    pts = points(F1, n)
    for g, h in product(reps, repeat=2):
        gh = g @ h
        for P in pts:
            assert act(gh, P) == act(g, act(h, P))


def test_action_axioms_random(F2):
    rng = random.Random(11)
    N = 8

    def rand_k():
        a, c = F2.elem((rng.randrange(1 << N) | 1, rng.randrange(1 << N)), N), F2.elem((rng.randrange(1 << N), rng.randrange(1 << N)), N)
        b = F2.elem((rng.randrange(1 << N), rng.randrange(1 << N)), N)
        d = (1 + b * c) * a ** -1
        return Mat2(a, b, c, d)

    pts = {n: points(F2, n) for n in (1, 2, 3, 4)}
    for _ in range(1000):
        g, h = rand_k(), rand_k()
        n = rng.randrange(1, 5)
        P = rng.choice(pts[n])
        assert act(g @ h, P) == act(g, act(h, P))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_transitivity(F1, F2, n):
    for F in (F1, F2):
        r = transitivity_check(F, n)
        assert r.passed and r.counts["points"] == point_count(n)


def test_stabilizer_examples(F1, F2):
    r = verify_stabilizer(F1, 1)
    assert r.passed and r.counts == {"reps": 6, "stabilizing": 2}
    r = verify_stabilizer(F1, 0)
    assert r.passed and r.counts["stabilizing"] == r.counts["reps"] == 1
    for F in (F1, F2):
        assert verify_stabilizer(F, 2).passed
    # orbit-stabilizer: 48 / |P^1(Z/4)| = 48 / 6
    assert verify_stabilizer(F1, 2).counts == {"reps": 48, "stabilizing": 8}


@pytest.mark.parametrize("F, n, m", [(q2(8), 1, 0), (q2(8), 2, 0), (q2(8), 1, 1), (q2(8), 2, 1),
                                     (sqrt2_field(8), 1, 1), (sqrt2_field(8), 2, 2)],
                         ids=lambda v: str(v) if isinstance(v, int) else f"e{v.e}")
def test_trivial_action(F, n, m):
    r = trivial_action_check(F, n, m)
    assert r.passed, r.witnesses
    assert r.counts["moved"] == 0 and r.counts["points"] == point_count(n + m)


def test_trivial_action_point_count_example(F1):
    assert trivial_action_check(F1, 1, 1).counts["points"] == 6
