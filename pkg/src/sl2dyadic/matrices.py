"""2x2 matrices over truncated and fractional elements, together with the
lattice shapes on which the trace pairing is defined.

Entries are either :class:`TruncElem` (integral matrices) or
:class:`FracElem`; all arithmetic is duck-typed so the same code serves
both.  Conjugation is ``X^g = g^-1 X g`` throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from .errors import NotInvertible, NotTraceZero, PrecisionTooSmall, ShapeViolation
from .padic import FieldSpec, FracElem, TruncElem, invert_unit, n_min
from .report import CheckReport


def _frac(x) -> FracElem:
    return x if isinstance(x, FracElem) else FracElem(x)


def times_pi_power(x, k: int) -> FracElem:
    """x * pi**k for any integer k, as a FracElem."""
    x = _frac(x)
    return FracElem(x.num, x.shift - k)


@dataclass(frozen=True)
class Mat2:
    a: object
    b: object
    c: object
    d: object

    @classmethod
    def from_ints(cls, F: FieldSpec, rows, prec: int | None = None) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(F.elem(a, prec), F.elem(b, prec), F.elem(c, prec), F.elem(d, prec))

    @classmethod
    def identity(cls, F: FieldSpec, prec: int | None = None) -> "Mat2":
        return cls.from_ints(F, ((1, 0), (0, 1)), prec)

    @classmethod
    def zero(cls, F: FieldSpec, prec: int | None = None) -> "Mat2":
        return cls.from_ints(F, ((0, 0), (0, 0)), prec)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def field(self) -> FieldSpec:
        return self.a.field

    @property
    def prec(self) -> int:
        """Precision of an integral matrix (entries share it)."""
        return self.a.prec

    def map(self, f) -> "Mat2":
        return Mat2(*(f(x) for x in self.entries))

    def is_integral(self) -> bool:
        return all(isinstance(x, TruncElem) or x.is_integral() for x in self.entries)

    def integral(self) -> "Mat2":
        return self.map(lambda x: x if isinstance(x, TruncElem) else x.to_trunc())

    def reduce(self, prec: int) -> "Mat2":
        return self.integral().map(lambda x: x.reduce(prec))

    def lift(self, prec: int) -> "Mat2":
        return self.map(lambda x: x.lift(prec))

    def at(self, prec: int) -> "Mat2":
        """Integral matrix lifted or reduced to ``prec``."""
        return self.integral().map(lambda x: x.at(prec))

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat2":
        return self.map(lambda x: -x)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.entries
        p, q, r, s = other.entries
        return Mat2(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)

    def scale(self, x) -> "Mat2":
        return self.map(lambda y: x * y)

    def minus_identity(self) -> "Mat2":
        return Mat2(self.a - 1, self.b, self.c, self.d - 1)

    def plus_identity(self) -> "Mat2":
        return Mat2(self.a + 1, self.b, self.c, self.d + 1)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def is_trace_zero(self) -> bool:
        return self.trace().is_zero()

    def inverse(self) -> "Mat2":
        if not self.is_integral():
            raise NotInvertible("only integral matrices with unit determinant are inverted")
        m = self.integral()
        det = m.det()
        if not det.is_unit():
            raise NotInvertible(f"determinant {det} is not a unit")
        t = invert_unit(det)
        return Mat2(m.d * t, -m.b * t, -m.c * t, m.a * t)

    def conjugate(self, g: "Mat2") -> "Mat2":
        """``g^-1 X g``."""
        return g.inverse() @ self @ g

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def det(X: Mat2):
    return X.det()


def mat_mul(X: Mat2, Y: Mat2) -> Mat2:
    return X @ Y


def mat_inv(X: Mat2) -> Mat2:
    return X.inverse()


def conjugate(X: Mat2, g: Mat2) -> Mat2:
    return X.conjugate(g)


ADDITIVE, MULTIPLICATIVE, DUAL = "additive", "multiplicative", "dual"


@dataclass(frozen=True)
class LatticeShape:
    """Shape (n, m, l) of the congruence lattice

        additive:        (p^n, p^(n+m); p^(n+l), p^n)
        multiplicative:  1 + additive, determinant one
        dual:            (p^(-n-e), p^(-n-l); p^(-n-m), p^(-n-e)), trace zero
    """

    n: int
    m: int
    l: int
    kind: str = ADDITIVE

    def __post_init__(self):
        if self.kind not in (ADDITIVE, MULTIPLICATIVE, DUAL):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.m < -1 or self.l < -1:
            raise ValueError("m and l must be >= -1")
        if self.kind == MULTIPLICATIVE and self.n < 1:
            raise ValueError("multiplicative shapes need n >= 1")

    def bounds(self, e: int) -> tuple:
        """Valuation lower bounds for the entries (a, b, c, d)."""
        n, m, l = self.n, self.m, self.l
        if self.kind == DUAL:
            return (-n - e, -n - l, -n - m, -n - e)
        return (n, n + m, n + l, n)

    def dual(self) -> "LatticeShape":
        return LatticeShape(self.n, self.m, self.l, DUAL)

    def swapped(self) -> "LatticeShape":
        return LatticeShape(self.n, self.l, self.m, self.kind)


def in_lattice(X: Mat2, shape: LatticeShape) -> bool:
    """Membership of X in the lattice or group described by ``shape``."""
    F = X.field
    M = X.minus_identity() if shape.kind == MULTIPLICATIVE else X
    for x, k in zip(M.entries, shape.bounds(F.e)):
        if not x.val_at_least(k):
            return False
    if shape.kind == MULTIPLICATIVE:
        dm1 = X.det() - 1
        if not dm1.is_zero():
            return False
        if isinstance(dm1, FracElem) and dm1.abs_prec < 1:
            raise PrecisionTooSmall("determinant not known modulo p")
    if shape.kind == DUAL:
        return X.is_trace_zero()
    return True


# -- coordinates of the trace pairing ----------------------------------------
#
# B = pi^n (a1, pi^m a2; pi^l a3, -a1)
# A = pi^-n (pi^-e b1, pi^-l b3; pi^-m b2, -pi^-e b1)
# trace(BA) = a1 b1 / u + a2 b2 + a3 b3

def lattice_element(F: FieldSpec, shape: LatticeShape, a, prec: int) -> Mat2:
    a1, a2, a3 = (_frac(F.elem(x, prec) if not isinstance(x, (TruncElem, FracElem)) else x) for x in a)
    n, m, l = shape.n, shape.m, shape.l
    d1 = times_pi_power(a1, n)
    return Mat2(d1, times_pi_power(a2, n + m), times_pi_power(a3, n + l), -d1)


def dual_element(F: FieldSpec, shape: LatticeShape, b, prec: int) -> Mat2:
    b1, b2, b3 = (_frac(F.elem(x, prec) if not isinstance(x, (TruncElem, FracElem)) else x) for x in b)
    n, m, l, e = shape.n, shape.m, shape.l, F.e
    d1 = times_pi_power(b1, -n - e)
    return Mat2(d1, times_pi_power(b3, -n - l), times_pi_power(b2, -n - m), -d1)


def lattice_coordinates(B: Mat2, shape: LatticeShape) -> tuple:
    n, m, l = shape.n, shape.m, shape.l
    return tuple(times_pi_power(x, -k).to_trunc() for x, k in ((B.a, n), (B.b, n + m), (B.c, n + l)))


def dual_coordinates(A: Mat2, shape: LatticeShape) -> tuple:
    n, m, l, e = shape.n, shape.m, shape.l, A.field.e
    return tuple(times_pi_power(x, k).to_trunc() for x, k in ((A.a, n + e), (A.c, n + m), (A.b, n + l)))


def closed_form_pair(a, b, u: TruncElem):
    """``a1 b1 / u + a2 b2 + a3 b3`` for coordinate triples."""
    P = min(x.prec for x in (*a, *b))
    a = [x.reduce(P) for x in a]
    b = [x.reduce(P) for x in b]
    return a[0] * b[0] * invert_unit(u.at(P)) + a[1] * b[1] + a[2] * b[2]


def trace_pair(B: Mat2, A: Mat2, shape: LatticeShape) -> TruncElem:
    """``trace(BA)`` for trace-zero B in ``shape`` and trace-zero A in its dual."""
    primal = LatticeShape(shape.n, shape.m, shape.l, ADDITIVE)
    if not B.is_trace_zero() or not A.is_trace_zero():
        raise NotTraceZero("both arguments of the pairing must have trace zero")
    if not in_lattice(B, primal):
        raise ShapeViolation(f"first argument is not in the {primal} lattice")
    if not in_lattice(A, primal.dual()):
        raise ShapeViolation("second argument is not in the dual lattice")
    return _frac((B @ A).trace()).to_trunc()


def nondegeneracy_check(F: FieldSpec, n: int, m: int, l: int, prec: int | None = None,
                        samples: int = 200, seed: int = 0) -> CheckReport:
    """Exhaustive residue-level non-degeneracy of the trace pairing, both
    argument orders, plus sampled bilinearity."""
    e = F.e
    N = prec if prec is not None else n_min(n, m, l, e)
    if N < n + e + 1:
        raise PrecisionTooSmall(f"precision {N} cannot decide the pairing modulo p")
    shape = LatticeShape(n, m, l)
    report = CheckReport("pairing", {"e": e, "n": n, "m": m, "l": l, "precision": N})
    residues = list(product((0, 1), repeat=3))
    Bs = {a: lattice_element(F, shape, a, N) for a in residues}
    As = {b: dual_element(F, shape, b, N) for b in residues}
    table = {(a, b): trace_pair(Bs[a], As[b], shape) for a in residues for b in residues}
    outside_p = {k: v.is_unit() for k, v in table.items()}

    for b in residues:
        if any(b):
            witnesses = [a for a in residues if outside_p[a, b]]
            report.record("dual_nondegenerate", bool(witnesses), {"b": b})
            # the explicit witness: a_i = 1 at a unit coordinate of b
            i = b.index(1)
            a = tuple(int(j == i) for j in range(3))
            report.record("explicit_witness", outside_p[a, b], {"b": b, "a": a})
        else:
            report.record("zero_class_in_p", not any(outside_p[a, b] for a in residues), {"b": b})
    for a in residues:
        if any(a):
            report.record("primal_nondegenerate", any(outside_p[a, b] for b in residues), {"a": a})

    rng = random.Random(seed)

    def rand_elem(k=N):
        return F.elem([rng.randrange(1 << k) for _ in range(e)], k)

    for _ in range(samples):
        x, y = rand_elem(), rand_elem()
        B, C = (lattice_element(F, shape, [rand_elem() for _ in range(3)], N) for _ in range(2))
        A, A2 = (dual_element(F, shape, [rand_elem() for _ in range(3)], N) for _ in range(2))
        lhs = trace_pair(B.scale(x) + C.scale(y), A, shape)
        report.record("bilinear_left", _agree(lhs, _combine(x, trace_pair(B, A, shape), y, trace_pair(C, A, shape))))
        lhs = trace_pair(B, A.scale(x) + A2.scale(y), shape)
        report.record("bilinear_right", _agree(lhs, _combine(x, trace_pair(B, A, shape), y, trace_pair(B, A2, shape))))
    report.counts = {"dual_residues": len(residues), "primal_residues": len(residues),
                     "pairings": len(table), "bilinearity_samples": samples}
    return report


def _agree(x: TruncElem, y: TruncElem) -> bool:
    P = min(x.prec, y.prec)
    return x.reduce(P) == y.reduce(P)


def _combine(x, p, y, q):
    P = min(p.prec, q.prec)
    return x.reduce(P) * p.reduce(P) + y.reduce(P) * q.reduce(P)


def closed_form_check(F: FieldSpec, n: int, m: int, l: int, samples: int = 10_000,
                      seed: int = 0, prec: int | None = None) -> CheckReport:
    """trace_pair against ``a1 b1 / u + a2 b2 + a3 b3`` on random coordinates."""
    e = F.e
    N = prec if prec is not None else n_min(n, m, l, e)
    shape = LatticeShape(n, m, l)
    report = CheckReport("closed_form", {"e": e, "n": n, "m": m, "l": l,
                                         "precision": N, "seed": seed})
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        a = [F.elem([rng.randrange(1 << N) for _ in range(e)], N) for _ in range(3)]
        b = [F.elem([rng.randrange(1 << N) for _ in range(e)], N) for _ in range(3)]
        got = trace_pair(lattice_element(F, shape, a, N), dual_element(F, shape, b, N), shape)
        want = closed_form_pair(a, b, F.u.at(N))
        if not _agree(got, want):
            bad += 1
            report.record("equal", False, {"a": [str(x) for x in a], "b": [str(x) for x in b]})
    report.record("equal", bad == 0)
    report.counts = {"samples": samples, "mismatches": bad}
    return report
