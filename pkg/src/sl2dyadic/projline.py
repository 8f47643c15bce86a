"""The projective line over o/p^n and the action of K on it.

Points are stored in one of two canonical forms, ``[1:y]`` or ``[x:1]``
with x a non-unit, so equality and hashing are structural.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalError, NotPrimitive, PrecisionTooSmall
from .groups import B_n, K, K_n, K_n_m, enumerate_cosets, membership
from .matrices import Mat2
from .padic import FieldSpec, TruncElem, invert_unit
from .report import CheckReport


@dataclass(frozen=True)
class ProjPoint:
    level: int
    x: TruncElem
    y: TruncElem

    @classmethod
    def make(cls, F: FieldSpec, x, y, n: int) -> "ProjPoint":
        return canonicalize_point(F.elem(x, n) if isinstance(x, int) else x,
                                  F.elem(y, n) if isinstance(y, int) else y, n)

    @property
    def field(self) -> FieldSpec:
        return self.x.field

    def __str__(self):
        return f"[{self.x}:{self.y}]_{self.level}"


def canonicalize_point(x: TruncElem, y: TruncElem, n: int) -> ProjPoint:
    if n == 0:
        z = x.field.zero(0)
        return ProjPoint(0, z, z)
    x, y = x.reduce(n), y.reduce(n)
    if x.is_unit():
        return ProjPoint(n, x.field.one(n), y * invert_unit(x))
    if y.is_unit():
        return ProjPoint(n, x * invert_unit(y), y.field.one(n))
    raise NotPrimitive(f"({x}, {y}) has no unit coordinate")


def act(g: Mat2, P: ProjPoint) -> ProjPoint:
    n = P.level
    if n == 0:
        return P
    g = g.integral()
    if g.prec < n:
        raise PrecisionTooSmall(f"matrix precision {g.prec} below point level {n}")
    a, b, c, d = (t.reduce(n) for t in g.entries)
    try:
        return canonicalize_point(a * P.x + b * P.y, c * P.x + d * P.y, n)
    except NotPrimitive as exc:
        raise InternalError(f"non-invertible action of {g}") from exc


def points(F: FieldSpec, n: int) -> list[ProjPoint]:
    if n == 0:
        return [canonicalize_point(F.one(0), F.zero(0), 0)]
    one = F.one(n)
    pts = [ProjPoint(n, one, y) for y in F.residues(n)]
    pts += [ProjPoint(n, x, one) for x in F.ideal_residues(1, n)]
    return pts


def point_count(n: int) -> int:
    """|P^1(o/p^n)| for a field with residue field of order 2."""
    return 1 if n == 0 else 2 ** n + 2 ** (n - 1)


def orbit(P: ProjPoint, group_elements) -> set:
    return {act(g, P) for g in group_elements}


def transitivity_check(F: FieldSpec, n: int) -> CheckReport:
    report = CheckReport("transitivity", {"e": F.e, "n": n})
    reps = enumerate_cosets(F, K(), K_n(max(n, 1))).representatives
    base = ProjPoint.make(F, 1, 0, n)
    orb = orbit(base, reps)
    every = set(points(F, n))
    report.record("orbit_is_everything", orb == every)
    report.record("point_count", len(every) == point_count(n))
    report.counts = {"points": len(every), "orbit": len(orb), "group_reps": len(reps)}
    return report


def verify_stabilizer(F: FieldSpec, n: int) -> CheckReport:
    """Stab([1:0]_n) = B_n, elementwise over K mod K_n."""
    report = CheckReport("stabilizer", {"e": F.e, "n": n})
    cosets = enumerate_cosets(F, K(), K_n(n))
    base = ProjPoint.make(F, 1, 0, n)
    stabilizing = 0
    for g in cosets.representatives:
        fixes = act(g, base) == base
        stabilizing += fixes
        if fixes != membership(g, B_n(n)):
            report.record("iff", False, {"g": str(g)})
    report.record("iff", True)
    report.counts = {"reps": cosets.index, "stabilizing": stabilizing}
    return report


def trivial_action_check(F: FieldSpec, n: int, m: int) -> CheckReport:
    """K_n^m fixes every point at level n+m and acts on [x:1] through its diagonal."""
    e = F.e
    L = n + m + e
    report = CheckReport("trivial_action", {"e": e, "n": n, "m": m, "level": L})
    reps = enumerate_cosets(F, K_n_m(n, m), K_n(L)).representatives
    pts = points(F, n + m)
    moved = diag_mismatch = 0
    for X in reps:
        diag = Mat2(X.a, X.a * 0, X.a * 0, invert_unit(X.a))
        for P in pts:
            Q = act(X, P)
            if Q != P:
                moved += 1
                report.record("fixes_points", False, {"X": str(X), "point": str(P)})
            if P.y.is_unit() and Q != act(diag, P):
                diag_mismatch += 1
                report.record("diagonal_part", False, {"X": str(X), "point": str(P)})
    report.record("fixes_points", moved == 0)
    report.record("diagonal_part", diag_mismatch == 0)
    report.counts = {"reps": len(reps), "points": len(pts),
                     "moved": moved, "diagonal_mismatches": diag_mismatch}
    if e < m or n < m:
        report.mark_outside("the computation assumes e, n >= m")
    return report
