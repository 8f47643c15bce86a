"""Smith normal form over the integers and finite abelian group presentations.

Only the right transform is tracked: characters of Z^k / rowspace(R) are
read off from it, and the left transform of a tall relation matrix would
be needlessly large.  Tall inputs are first reduced to a row-echelon basis
of their row space, which leaves the quotient unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm, prod

from .errors import Overflow


def _identity(k: int) -> list[list[int]]:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def row_basis(rows, ncols: int) -> list[list[int]]:
    """Echelon basis of the Z-row space spanned by ``rows``."""
    pivots: dict[int, list[int]] = {}
    for row in rows:
        r = list(row)
        for col in range(ncols):
            if r[col] == 0:
                continue
            if col not in pivots:
                if r[col] < 0:
                    r = [-x for x in r]
                pivots[col] = r
                break
            p = pivots[col]
            # gcd step on the pivot column, keeping both rows in the lattice
            a, b = p[col], r[col]
            while b:
                q = a // b
                p, r = r, [x - q * y for x, y in zip(p, r)]
                a, b = b, a - q * b
            if p[col] < 0:
                p = [-x for x in p]
            pivots[col] = p
            if not any(r):
                break
    return [pivots[c] for c in sorted(pivots)]


def smith_normal_form(A, track_left: bool = False):
    """Return ``(D, P, Q)`` with ``P A Q = D`` diagonal, ``d_i | d_(i+1)``.

    ``P`` is None unless ``track_left``.
    """
    M = [list(map(int, r)) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    P = _identity(rows) if track_left else None
    Q = _identity(cols)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        if P is not None:
            P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for r in M:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):
        M[dst] = [x - k * y for x, y in zip(M[dst], M[src])]
        if P is not None:
            P[dst] = [x - k * y for x, y in zip(P[dst], P[src])]

    def add_col(dst, src, k):
        for r in M:
            r[dst] -= k * r[src]
        for r in Q:
            r[dst] -= k * r[src]

    t = 0
    while t < min(rows, cols):
        while True:
            # smallest entry as pivot keeps coefficient growth in check
            nonzero = [(abs(M[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if M[i][j]]
            if not nonzero:
                return M, P, Q
            _, i, j = min(nonzero)
            swap_rows(t, i)
            swap_cols(t, j)
            p = M[t][t]
            for i in range(t + 1, rows):
                if M[i][t]:
                    add_row(i, t, _nearest(M[i][t], p))
            for j in range(t + 1, cols):
                if M[t][j]:
                    add_col(j, t, _nearest(M[t][j], p))
            if any(M[i][t] for i in range(t + 1, rows)) or any(M[t][j] for j in range(t + 1, cols)):
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if M[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            if P is not None:
                P[t] = [-x for x in P[t]]
        t += 1
    return M, P, Q


def _nearest(a: int, p: int) -> int:
    return round(Fraction(a, p))


def invariant_factors(A) -> list[int]:
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


@dataclass
class GroupPresentation:
    """Z^k modulo the row space of ``relations``, for ``k`` labelled generators."""

    generators: list
    relations: list

    def __post_init__(self):
        k = len(self.generators)
        basis = row_basis(self.relations, k)
        if len(basis) < k:
            raise ValueError("presentation describes an infinite group")
        D, _, Q = smith_normal_form(basis)
        self.invariants = [D[i][i] for i in range(k)]
        self.transform = Q

    @property
    def order(self) -> int:
        return prod(self.invariants)

    @property
    def cyclic_factors(self) -> list[int]:
        return [d for d in self.invariants if d > 1]

    def generator_orders(self) -> list[int]:
        """Order of each generator; generator i maps to row i of the transform."""
        out = []
        for row in self.transform:
            o = 1
            for x, d in zip(row, self.invariants):
                o = lcm(o, d // gcd(x, d))
            out.append(o)
        return out

    def characters(self, cap: int = 1 << 16) -> list[tuple]:
        """Every homomorphism to Q/Z, as its values on the generators."""
        if self.order > cap:
            raise Overflow(f"character group of order {self.order} exceeds cap {cap}")
        k = len(self.generators)
        out = []
        for ks in product(*(range(d) for d in self.invariants)):
            diag = [Fraction(a, d) for a, d in zip(ks, self.invariants)]
            phi = tuple(sum((self.transform[i][j] * diag[j] for j in range(k)), Fraction(0)) % 1
                        for i in range(k))
            out.append(phi)
        return out

