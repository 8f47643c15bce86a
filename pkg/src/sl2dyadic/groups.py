"""Congruence subgroups of SL_2(o) and exact coset enumeration in their
finite quotients, plus the additive coordinates ``theta``.

Every subgroup handled here is described by four valuation bounds on the
entries of ``X - 1``:

    K            (0, 0, 0, 0)
    K_n          (n, n, n, n)
    B_n          (0, 0, n, 0)
    K_n^m        (n, n+m, n+m, n)
    G(n, m, l)   (n, n+m, n+l, n)

so membership is decided modulo ``p^depth`` and every quotient S/T is
computed exactly inside SL_2(o/p^L) for L = depth(T).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import (
    HypothesisViolated,
    NotASubgroup,
    Overflow,
    PrecisionTooSmall,
    ShapeViolation,
)
from .matrices import Mat2
from .padic import FieldSpec, TruncElem, divide_by_pi_power, invert_unit
from .report import CheckReport
from .tables import (
    ResidueRing,
    batch_inverse_sl2,
    batch_mul,
    congruence_mask,
    residue_ring,
)

DEFAULT_COSET_CAP = 1 << 18


@dataclass(frozen=True)
class SubgroupDesc:
    tag: str
    params: tuple = ()

    def __post_init__(self):
        arity = {"K": 0, "K_n": 1, "B_n": 1, "K_n_m": 2, "G": 3}
        if self.tag not in arity:
            raise ValueError(f"unknown subgroup tag {self.tag!r}")
        if len(self.params) != arity[self.tag]:
            raise ValueError(f"{self.tag} takes {arity[self.tag]} parameters")
        if any(p < 0 for p in self.params[:1]):
            raise ValueError("level must be non-negative")
        if self.tag == "K_n_m" and self.params[1] < 0:
            raise ValueError("K_n^m needs m >= 0")
        if self.tag == "G":
            n, m, l = self.params
            if n < 1 or m < -1 or l < -1:
                raise ValueError("G(n, m, l) needs n >= 1 and m, l >= -1")

    def bounds(self) -> tuple:
        """Valuation bounds on the entries of X - 1, clipped at 0."""
        p = self.params
        if self.tag == "K":
            raw = (0, 0, 0, 0)
        elif self.tag == "K_n":
            raw = (p[0],) * 4
        elif self.tag == "B_n":
            raw = (0, 0, p[0], 0)
        elif self.tag == "K_n_m":
            n, m = p
            raw = (n, n + m, n + m, n)
        else:
            n, m, l = p
            raw = (n, n + m, n + l, n)
        return tuple(max(b, 0) for b in raw)

    @property
    def depth(self) -> int:
        return max(self.bounds())

    def contains_shape(self, other: "SubgroupDesc") -> bool:
        return all(x <= y for x, y in zip(self.bounds(), other.bounds()))

    def is_group(self) -> bool:
        """Closed under multiplication.  Only G(n, m, l) with n+m+l < 0 fails."""
        if self.tag != "G":
            return True
        n, m, l = self.params
        return n + m + l >= 0

    def __str__(self):
        if not self.params:
            return self.tag
        return f"{self.tag}({', '.join(map(str, self.params))})"


def K() -> SubgroupDesc:
    return SubgroupDesc("K")


def K_n(n: int) -> SubgroupDesc:
    return SubgroupDesc("K_n", (n,))


def B_n(n: int) -> SubgroupDesc:
    return SubgroupDesc("B_n", (n,))


def K_n_m(n: int, m: int) -> SubgroupDesc:
    return SubgroupDesc("K_n_m", (n, m))


def G(n: int, m: int, l: int) -> SubgroupDesc:
    return SubgroupDesc("G", (n, m, l))


def membership(X: Mat2, S: SubgroupDesc) -> bool:
    if not X.is_integral():
        return False
    X = X.integral()
    if X.prec < max(S.depth, 1):
        raise PrecisionTooSmall(f"precision {X.prec} cannot decide membership in {S}")
    if not (X.det() - 1).is_zero():
        return False
    M = X.minus_identity()
    return all(x.val_at_least(k) for x, k in zip(M.entries, S.bounds()))


# -- subgroup images in SL_2(o/p^L) --------------------------------------------

def subgroup_image(R: ResidueRing, S: SubgroupDesc):
    """All elements of the image of S in SL_2(o/p^L), as a batched matrix.

    Built directly from the entry bounds, so the cost is proportional to
    the image and not to all of SL_2(o/p^L).
    """
    b11, b12, b21, b22 = (min(b, R.level) for b in S.bounds())
    one = R.one
    shifted = lambda k: R.add[one, R.with_valuation_at_least(k)]  # noqa: E731
    a_set, d_set = shifted(b11), shifted(b22)
    b_set, c_set = R.with_valuation_at_least(b12), R.with_valuation_at_least(b21)
    parts = []
    a_units = a_set[R.inv[a_set] >= 0]
    if a_units.size:
        a, b, c = (x.ravel() for x in np.meshgrid(a_units, b_set, c_set, indexing="ij"))
        d = R.mul[R.add[one, R.mul[b, c]], R.inv[a]]
        keep = R.val[R.sub(d, one)] >= b22
        parts.append(tuple(x[keep] for x in (a, b, c, d)))
    a_non = a_set[R.inv[a_set] < 0]
    c_units = c_set[R.inv[c_set] >= 0]
    if a_non.size and c_units.size:
        a, c, d = (x.ravel() for x in np.meshgrid(a_non, c_units, d_set, indexing="ij"))
        b = R.mul[R.sub(R.mul[a, d], one), R.inv[c]]
        keep = R.val[b] >= b12
        parts.append(tuple(x[keep] for x in (a, b, c, d)))
    if not parts:
        return tuple(np.zeros(0, dtype=np.int32) for _ in range(4))
    return tuple(np.concatenate([p[i] for p in parts]).astype(np.int32) for i in range(4))


def matrix_keys(R: ResidueRing, X) -> np.ndarray:
    s = np.int64(R.size)
    a, b, c, d = (x.astype(np.int64) for x in X)
    return ((a * s + b) * s + c) * s + d


def lift_sl2(F: FieldSpec, a: TruncElem, b: TruncElem, c: TruncElem, d: TruncElem,
             prec: int) -> Mat2:
    """A determinant-one lift to ``prec`` of a matrix that has det 1 at lower precision."""
    a, b, c, d = (x.lift(prec) for x in (a, b, c, d))
    if a.is_unit():
        d = (1 + b * c) * invert_unit(a)
    else:
        b = (a * d - 1) * invert_unit(c)
    return Mat2(a, b, c, d)


def batch_to_mats(R: ResidueRing, X, prec: int | None = None) -> list[Mat2]:
    F = R.field
    prec = R.level if prec is None else prec
    out = []
    for a, b, c, d in zip(*X):
        entries = [R.element(i) for i in (a, b, c, d)]
        out.append(lift_sl2(F, *entries, prec) if prec > R.level else Mat2(*entries))
    return out


def mats_to_batch(R: ResidueRing, mats) -> tuple:
    cols = [[R.index(x.reduce(R.level)) for x in M.integral().entries] for M in mats]
    return tuple(np.array(col, dtype=np.int32) for col in zip(*cols)) if cols else \
        tuple(np.zeros(0, dtype=np.int32) for _ in range(4))


@dataclass
class CosetSystem:
    """Left cosets X*T of T in S, computed in SL_2(o/p^level).

    ``rep_batch`` holds the representatives as index arrays; each is the
    element of smallest key in its coset, so the list is canonical.
    """

    subgroup: SubgroupDesc
    modulus: SubgroupDesc
    ring: ResidueRing
    rep_batch: tuple
    index: int
    closed: bool = True
    _sorted_keys: np.ndarray = field(default=None, repr=False)
    _coset_of_sorted: np.ndarray = field(default=None, repr=False)

    @property
    def level(self) -> int:
        return self.ring.level

    @property
    def representatives(self) -> list[Mat2]:
        return batch_to_mats(self.ring, self.rep_batch)

    def lifted(self, prec: int) -> list[Mat2]:
        return batch_to_mats(self.ring, self.rep_batch, prec)

    def locate(self, X) -> np.ndarray:
        """Coset number of each matrix in a batch; -1 for elements outside S."""
        keys = matrix_keys(self.ring, X)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        hit = self._sorted_keys[pos] == keys
        return np.where(hit, self._coset_of_sorted[pos], -1)

    def locate_matrix(self, X: Mat2) -> int:
        return int(self.locate(mats_to_batch(self.ring, [X]))[0])

    def multiplication_table(self) -> np.ndarray:
        """Coset of rep_i * rep_j (well defined when T is normal in S)."""
        k = self.index
        i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
        Xi = tuple(x[i.ravel()] for x in self.rep_batch)
        Xj = tuple(x[j.ravel()] for x in self.rep_batch)
        return self.locate(batch_mul(self.ring, Xi, Xj)).reshape(k, k)


def enumerate_cosets(F: FieldSpec, S: SubgroupDesc, T: SubgroupDesc,
                     cap: int = DEFAULT_COSET_CAP) -> CosetSystem:
    if not S.contains_shape(T):
        raise NotASubgroup(f"{T} is not contained in {S}")
    level = max(T.depth, 1)
    R = residue_ring(F, level)
    S_img = subgroup_image(R, S)
    T_img = subgroup_image(R, T)
    nS, nT = len(S_img[0]), len(T_img[0])
    if nS // nT > cap:
        raise Overflow(f"|{S} / {T}| = {nS // nT} exceeds cap {cap}")
    keys = matrix_keys(R, S_img)
    order = np.argsort(keys)
    sorted_keys = keys[order]
    # canonical representative of x*T: the smallest key in the coset
    best = keys.copy()
    closed = True
    for t in range(nT):
        tt = tuple(np.full(nS, x[t], dtype=np.int32) for x in T_img)
        prod_keys = matrix_keys(R, batch_mul(R, S_img, tt))
        pos = np.minimum(np.searchsorted(sorted_keys, prod_keys), nS - 1)
        inside = sorted_keys[pos] == prod_keys
        closed &= bool(inside.all())
        best = np.minimum(best, np.where(inside, prod_keys, best))
    rep_keys, coset_ids = np.unique(best, return_inverse=True)
    rep_pos = np.searchsorted(sorted_keys, rep_keys)
    rep_batch = tuple(x[order[rep_pos]] for x in S_img)
    return CosetSystem(S, T, R, rep_batch, len(rep_keys), closed,
                       sorted_keys, coset_ids.ravel()[order])


# -- additive coordinates --------------------------------------------------------

@dataclass(frozen=True)
class AdditiveQuotientElem:
    """``(a1, a2, a3)`` in (o/p^n)^3: X - 1 = (pi^n a1, pi^(n+m) a2; pi^(n+l) a3, *)."""

    field: FieldSpec
    n: int
    m: int
    l: int
    coords: tuple

    def __post_init__(self):
        coords = tuple(x.reduce(self.n) if isinstance(x, TruncElem) else self.field.elem(x, self.n)
                       for x in self.coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, F: FieldSpec, n: int, m: int, l: int) -> "AdditiveQuotientElem":
        return cls(F, n, m, l, (0, 0, 0))

    @classmethod
    def all(cls, F: FieldSpec, n: int, m: int, l: int) -> Iterator["AdditiveQuotientElem"]:
        res = list(F.residues(n))
        for a3 in res:
            for a2 in res:
                for a1 in res:
                    yield cls(F, n, m, l, (a1, a2, a3))

    def _check(self, other):
        if (self.field, self.n, self.m, self.l) != (other.field, other.n, other.m, other.l):
            raise ShapeViolation("coordinates of different quotients")

    def __add__(self, other):
        self._check(other)
        return AdditiveQuotientElem(self.field, self.n, self.m, self.l,
                                    tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return AdditiveQuotientElem(self.field, self.n, self.m, self.l,
                                    tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-other)

    @property
    def key(self) -> tuple:
        return tuple(x.coeffs for x in self.coords)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


def theta(X: Mat2, n: int, m: int, l: int) -> AdditiveQuotientElem:
    if n < 1 or m < -1 or l < -1:
        raise ShapeViolation(f"theta needs n >= 1 and m, l >= -1, got ({n}, {m}, {l})")
    X = X.integral()
    need = n + max(m, l, 0) + n
    if X.prec < need:
        raise PrecisionTooSmall(f"theta at ({n}, {m}, {l}) needs precision {need}")
    if not membership(X, G(n, m, l)):
        raise ShapeViolation(f"matrix is not in G({n}, {m}, {l})")
    a1 = divide_by_pi_power(X.a - 1, n)
    a2 = divide_by_pi_power(X.b, n + m)
    a3 = divide_by_pi_power(X.c, n + l)
    return AdditiveQuotientElem(X.field, n, m, l, tuple(x.reduce(n) for x in (a1, a2, a3)))


def theta_inverse(v: AdditiveQuotientElem, prec: int | None = None) -> Mat2:
    F, n, m, l = v.field, v.n, v.m, v.l
    N = prec if prec is not None else 2 * n + max(m, l, 0) + F.e
    a1, a2, a3 = (x.lift(N) for x in v.coords)
    a = 1 + a1 * F.pi_power(n, N)
    b = a2 * F.pi_power(n + m, N)
    c = a3 * F.pi_power(n + l, N)
    return Mat2(a, b, c, (1 + b * c) * invert_unit(a))


def _theta_or_none(X: Mat2, n: int, m: int, l: int):
    try:
        return theta(X, n, m, l)
    except ShapeViolation:
        return None


def theta_hom_check(F: FieldSpec, n: int, m: int, l: int, samples: int | None = None,
                    seed: int = 0, prec: int | None = None) -> CheckReport:
    """theta as a group isomorphism: homomorphism, round trip, cardinality."""
    N = prec if prec is not None else 2 * n + max(m, l, 0) + F.e
    report = CheckReport("theta", {"e": F.e, "n": n, "m": m, "l": l, "precision": N})
    coords = list(AdditiveQuotientElem.all(F, n, m, l))
    mats = [theta_inverse(v, N) for v in coords]
    round_trip = sum(_theta_or_none(X, n, m, l) == v for X, v in zip(mats, coords))
    report.record("round_trip", round_trip == len(coords))
    keys = {v.key for v in coords}
    report.record("cardinality", len(keys) == len(coords) == 2 ** (3 * n))
    if samples is None:
        pairs = [(i, j) for i in range(len(mats)) for j in range(len(mats))]
    else:
        rng = random.Random(seed)
        pairs = [(rng.randrange(len(mats)), rng.randrange(len(mats))) for _ in range(samples)]
        report.params["seed"] = seed
    bad = 0
    for i, j in pairs:
        lhs = _theta_or_none(mats[i] @ mats[j], n, m, l)
        # leaving the set is possible only when m + l < 0
        report.record("closed", lhs is not None, {"X": str(coords[i]), "Y": str(coords[j])})
        if lhs != coords[i] + coords[j]:
            bad += 1
            report.record("homomorphism", False, {"X": str(coords[i]), "Y": str(coords[j])})
    report.record("homomorphism", bad == 0)
    report.counts = {"elements": len(coords), "pairs": len(pairs), "failures": bad}
    if m + l < 0:
        report.mark_outside("m + l < 0")
    return report


# -- closure and normality ---------------------------------------------------------

def closure_check(F: FieldSpec, S: SubgroupDesc, level: int | None = None,
                  max_pairs: int = 1 << 22, seed: int = 0) -> CheckReport:
    """S is closed under products and inverses in SL_2(o/p^level)."""
    L = level if level is not None else max(S.depth, 1)
    R = residue_ring(F, L)
    X = subgroup_image(R, S)
    size = len(X[0])
    report = CheckReport("closure", {"e": F.e, "group": str(S), "level": L})
    inv = batch_inverse_sl2(R, X)
    report.record("inverse", bool(np.all(congruence_mask(R, inv, S.bounds()))))
    if size * size <= max_pairs:
        i, j = (x.ravel() for x in np.meshgrid(np.arange(size), np.arange(size), indexing="ij"))
    else:
        rng = np.random.default_rng(seed)
        i, j = rng.integers(0, size, max_pairs), rng.integers(0, size, max_pairs)
        report.params["seed"] = seed
    P = batch_mul(R, tuple(x[i] for x in X), tuple(x[j] for x in X))
    ok = congruence_mask(R, P, S.bounds())
    if not ok.all():
        k = int(np.argmin(ok))
        report.record("product", False, {"X": _batch_entry(R, X, i[k]),
                                         "Y": _batch_entry(R, X, j[k])})
    report.record("product", bool(ok.all()))
    report.counts = {"elements": size, "pairs": int(len(i))}
    return report


def _batch_entry(R: ResidueRing, X, k) -> list:
    return [str(R.element(x[k])) for x in X]


def normality_check(F: FieldSpec, n: int, m: int, mode: str = "exhaustive",
                    samples: int = 2000, seed: int = 0) -> CheckReport:
    """K_n^m is normal in K, swept modulo K_(n+m+e)."""
    e = F.e
    L = n + m + e
    report = CheckReport("normality", {"e": e, "n": n, "m": m, "level": L, "mode": mode})
    R = residue_ring(F, L)
    H = subgroup_image(R, K_n_m(n, m))
    Gs = subgroup_image(R, K())
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(Gs[0]), size=min(samples, len(Gs[0])), replace=False)
        Gs = tuple(x[np.sort(pick)] for x in Gs)
        report.params["seed"] = seed
    elif mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    Ginv = batch_inverse_sl2(R, Gs)
    bounds = K_n_m(n, m).bounds()
    failures = 0
    for k in range(len(H[0])):
        h = tuple(np.full(len(Gs[0]), x[k], dtype=np.int32) for x in H)
        conj = batch_mul(R, batch_mul(R, Gs, h), Ginv)
        ok = congruence_mask(R, conj, bounds)
        if not ok.all():
            bad = np.nonzero(~ok)[0]
            failures += len(bad)
            report.record("conjugation", False, {"g": _batch_entry(R, Gs, bad[0]),
                                                 "h": _batch_entry(R, H, k)})
    report.record("conjugation", failures == 0)
    report.counts = {"g": int(len(Gs[0])), "h": int(len(H[0])),
                     "conjugations": int(len(Gs[0]) * len(H[0])), "failures": failures}
    if e < m or n < m:
        report.mark_outside("normality is only claimed for e, n >= m")
    return report


def require_hypothesis(F: FieldSpec, n: int, m: int):
    if F.e < m or n < m:
        raise HypothesisViolated(f"need e, n >= m (e={F.e}, n={n}, m={m})")


def conjugate_intersection_check(F: FieldSpec, n: int, m: int) -> CheckReport:
    """K_n^m as (B_(n+m) and K_n) meet Stab([0:1]), and as the intersection
    of all K-conjugates of B_(n+m) and K_n."""
    from .projline import ProjPoint, act, trivial_action_check

    e = F.e
    L = n + m + e
    report = CheckReport("conjugates", {"e": e, "n": n, "m": m, "level": L})
    target = K_n_m(n, m)
    # (a) pointwise over K_n mod K_L
    R = residue_ring(F, L)
    reps = subgroup_image(R, K_n(n))
    in_target = congruence_mask(R, reps, target.bounds())
    in_borel = congruence_mask(R, reps, B_n(n + m).bounds())
    origin = ProjPoint.make(F, 0, 1, n + m)
    mismatches = 0
    for k, X in enumerate(batch_to_mats(R, reps)):
        fixes = act(X, origin) == origin
        if bool(in_target[k]) != (bool(in_borel[k]) and fixes):
            mismatches += 1
            report.record("stabilizer_intersection", False, {"X": str(X)})
    report.record("stabilizer_intersection", mismatches == 0)
    # (b) pointwise triviality on P^1 at level n+m
    sub = trivial_action_check(F, n, m)
    report.record("fixes_all_points", sub.checks.get("fixes_points", sub.passed))
    # (c) the intersection of all conjugates, at level n+m
    Ls = max(n + m, 1)
    Rs = residue_ring(F, Ls)
    Xs = subgroup_image(Rs, K_n(n))
    Gs = subgroup_image(Rs, K())
    Ginv = batch_inverse_sl2(Rs, Gs)
    bn = B_n(n + m).bounds()
    inter = np.ones(len(Xs[0]), dtype=bool)
    for k in range(len(Xs[0])):
        x = tuple(np.full(len(Gs[0]), c[k], dtype=np.int32) for c in Xs)
        conj = batch_mul(Rs, batch_mul(Rs, Gs, x), Ginv)
        inter[k] = bool(np.all(congruence_mask(Rs, conj, bn)))
    expected = congruence_mask(Rs, Xs, target.bounds())
    report.record("conjugate_intersection", bool(np.array_equal(inter, expected)))
    report.counts = {"K_n_reps": int(len(reps[0])), "intersection": int(inter.sum()),
                     "K_n_m_image": int(expected.sum())}
    if e < m or n < m:
        report.mark_outside("the lemma assumes e, n >= m")
    return report
