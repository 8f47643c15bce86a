"""Index-encoded residue rings for vectorized exhaustive sweeps.

Every element of ``o/p^L`` gets an integer index (mixed radix over its
canonical coefficients).  Addition, multiplication and valuation tables
are filled once using the scalar arithmetic of :mod:`sl2dyadic.padic`,
after which 2x2 matrix work over whole arrays of matrices is just numpy
fancy indexing.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .padic import AtLeast, FieldSpec, TruncElem, _moduli, invert_unit

MAX_TABLE_LEVEL = 10


class ResidueRing:
    """``o/p^level`` with lookup tables."""

    def __init__(self, F: FieldSpec, level: int):
        if level > MAX_TABLE_LEVEL:
            raise ValueError(f"table level {level} exceeds {MAX_TABLE_LEVEL}")
        self.field = F
        self.level = level
        self.moduli = _moduli(F.e, level)
        self.weights = np.cumprod((1,) + self.moduli[:-1]).tolist()
        self.elements = list(F.residues(level))
        self.size = len(self.elements)
        assert self.size == 2 ** level
        n = self.size
        self.add = np.empty((n, n), dtype=np.int32)
        self.mul = np.empty((n, n), dtype=np.int32)
        for i, x in enumerate(self.elements):
            for j in range(i, n):
                y = self.elements[j]
                self.add[i, j] = self.add[j, i] = self.index(x + y)
                self.mul[i, j] = self.mul[j, i] = self.index(x * y)
        self.neg = np.array([self.index(-x) for x in self.elements], dtype=np.int32)
        vals = []
        for x in self.elements:
            v = x.valuation()
            vals.append(level if isinstance(v, AtLeast) else v)
        self.val = np.array(vals, dtype=np.int32)
        self.inv = np.array(
            [self.index(invert_unit(x)) if x.is_unit() else -1 for x in self.elements],
            dtype=np.int32,
        )
        self.zero = self.index(F.zero(level))
        self.one = self.index(F.one(level))

    def index(self, x: TruncElem) -> int:
        if x.prec != self.level:
            x = x.reduce(self.level)
        return sum(c * w for c, w in zip(x.coeffs, self.weights))

    def element(self, i: int) -> TruncElem:
        return self.elements[int(i)]

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    def units(self) -> np.ndarray:
        return np.nonzero(self.inv >= 0)[0].astype(np.int32)

    def with_valuation_at_least(self, k: int) -> np.ndarray:
        return np.nonzero(self.val >= k)[0].astype(np.int32)


@lru_cache(maxsize=32)
def residue_ring(F: FieldSpec, level: int) -> ResidueRing:
    return ResidueRing(F, level)


# Batched 2x2 matrices are tuples (a, b, c, d) of index arrays.

def batch_mul(R: ResidueRing, X, Y):
    a1, b1, c1, d1 = X
    a2, b2, c2, d2 = Y
    A, M = R.add, R.mul
    return (
        A[M[a1, a2], M[b1, c2]],
        A[M[a1, b2], M[b1, d2]],
        A[M[c1, a2], M[d1, c2]],
        A[M[c1, b2], M[d1, d2]],
    )


def batch_inverse_sl2(R: ResidueRing, X):
    a, b, c, d = X
    return (d, R.neg[b], R.neg[c], a)


def batch_det(R: ResidueRing, X):
    a, b, c, d = X
    return R.sub(R.mul[a, d], R.mul[b, c])


def sl2(R: ResidueRing):
    """All of SL_2(o/p^L) as a batched matrix, in a fixed order."""
    n = R.size
    elems = np.arange(n, dtype=np.int32)
    units = R.units()
    nonunits = np.nonzero(R.inv < 0)[0].astype(np.int32)
    parts = []
    # a a unit: b free, d = (1 + bc)/a
    a, c, b = np.meshgrid(units, elems, elems, indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    d = R.mul[R.add[R.one, R.mul[b, c]], R.inv[a]]
    parts.append((a, b, c, d))
    # a a non-unit, so c is a unit: d free, b = (ad - 1)/c
    a, c, d = np.meshgrid(nonunits, units, elems, indexing="ij")
    a, c, d = a.ravel(), c.ravel(), d.ravel()
    b = R.mul[R.sub(R.mul[a, d], R.one), R.inv[c]]
    parts.append((a, b, c, d))
    return tuple(np.concatenate([p[i] for p in parts]).astype(np.int32) for i in range(4))


def congruence_mask(R: ResidueRing, X, bounds):
    """Entrywise test of ``X - 1`` against valuation bounds (b11, b12, b21, b22)."""
    a, b, c, d = X
    b11, b12, b21, b22 = bounds
    one = R.one
    return (
        (R.val[R.sub(a, one)] >= b11)
        & (R.val[b] >= b12)
        & (R.val[c] >= b21)
        & (R.val[R.sub(d, one)] >= b22)
    )


def select(X, mask):
    return tuple(x[mask] for x in X)
