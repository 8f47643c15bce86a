"""The parametrization A -> psi_A of characters and its verification.

Character values are exact elements of Q/Z with power-of-two denominator
(:class:`DyadicRotation`); a value ``r`` stands for the root of unity
``exp(2 pi i r)``.

The duality check compares two independent descriptions of the character
group of H = G(n,m,l) / G(2n,m,l):

* the oracle presents H from its multiplication table alone (Cayley graph,
  spanning tree, Schreier relations, Smith normal form) and lists every
  homomorphism H -> Q/Z;
* the parametrization evaluates psi_A(X) = chi(trace((X - 1) A)) for every
  residue class of A.

Neither side uses theta or any closed form from the other.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import HypothesisViolated, Overflow, PrecisionExhausted, ShapeViolation
from .groups import (
    CosetSystem,
    G,
    enumerate_cosets,
    lift_sl2,
    matrix_keys,
    mats_to_batch,
    membership,
    subgroup_image,
)
from .matrices import DUAL, LatticeShape, Mat2, dual_element, in_lattice, times_pi_power
from .padic import FieldSpec, FracElem, TruncElem, invert_unit, n_min
from .report import CheckReport
from .snf import GroupPresentation
from .tables import batch_inverse_sl2, batch_mul, residue_ring

CHARACTER_CAP = 1 << 14
VALUE_BITS = 32  # table path stores r in Q/Z as r * 2^VALUE_BITS mod 2^VALUE_BITS
_VMOD = 1 << VALUE_BITS


@dataclass(frozen=True, order=True)
class DyadicRotation:
    """``numerator / 2**exponent`` modulo 1, canonical."""

    numerator: int = 0
    exponent: int = 0

    def __post_init__(self):
        num, k = self.numerator % (1 << self.exponent), self.exponent
        while k and num % 2 == 0:
            num, k = num // 2, k - 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def from_fraction(cls, r: Fraction) -> "DyadicRotation":
        r = Fraction(r) % 1
        k = r.denominator.bit_length() - 1
        if r.denominator != 1 << k:
            raise ValueError(f"{r} is not dyadic")
        return cls(r.numerator, k)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def __add__(self, other: "DyadicRotation") -> "DyadicRotation":
        k = max(self.exponent, other.exponent)
        return DyadicRotation((self.numerator << (k - self.exponent))
                              + (other.numerator << (k - other.exponent)), k)

    def __neg__(self):
        return DyadicRotation(-self.numerator, self.exponent)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int) -> "DyadicRotation":
        return DyadicRotation(self.numerator * k, self.exponent)

    __rmul__ = __mul__

    def __str__(self):
        return "0" if self.numerator == 0 else f"{self.numerator}/{1 << self.exponent}"


ZERO = DyadicRotation()


# -- additive characters of p^-K / p^c -----------------------------------------------

def _digits(x: TruncElem) -> list[int]:
    """pi-adic digits in {0, 1}: x = sum d_i pi^i modulo p^prec."""
    from .padic import divide_by_pi_power

    out = []
    while x.prec:
        d = x.coeffs[0] % 2
        out.append(d)
        x = divide_by_pi_power(x - d, 1)
    return out


@dataclass(frozen=True)
class AdditiveCharacter:
    """A character of p^-depth / p^conductor, nontrivial on p^(conductor-1).

    ``phi[j]`` is the value on pi^(j - depth); values on arbitrary elements
    follow by Z-linearity from the canonical coefficients.
    """

    field: FieldSpec
    depth: int
    conductor: int
    phi: tuple
    invariants: tuple
    certificate: dict = field(compare=False, hash=False)

    @property
    def span(self) -> int:
        return self.depth + self.conductor

    def __call__(self, x) -> DyadicRotation:
        F = self.field
        if isinstance(x, int):
            x = FracElem(F.elem(x, max(self.span, 1)))
        elif isinstance(x, TruncElem):
            x = FracElem(x)
        v = x.valuation()
        if not isinstance(v, int):
            v = v.bound
        if v < -self.depth:
            raise ShapeViolation(f"valuation {v} lies outside the domain p^-{self.depth}")
        if x.abs_prec < self.conductor:
            raise PrecisionExhausted(
                f"argument known modulo p^{x.abs_prec}, character needs p^{self.conductor}")
        if x.abs_prec + self.depth <= 0 or self.span == 0:
            return ZERO
        y = times_pi_power(x, self.depth).to_trunc(self.span)
        total = sum((c * self.phi[i] for i, c in enumerate(y.coeffs)), Fraction(0))
        return DyadicRotation.from_fraction(total)


def build_character(F: FieldSpec, depth: int, conductor: int = 0,
                    variant: int = 0) -> AdditiveCharacter:
    """A character of p^-depth that is trivial on p^conductor and nontrivial on
    p^(conductor-1).  ``variant`` picks among the valid ones in a fixed order."""
    if depth < 1 and conductor < 1:
        raise ValueError("the domain must be nontrivial")
    M = depth + conductor
    gens = [f"pi^{j - depth}" for j in range(M)]
    relations = []
    for j in range(M):
        row = [0] * M
        row[j] += 2
        for i, d in enumerate(_digits(F.pi_power(j, M) * 2)):
            row[i] -= d
        relations.append(row)
    pres = GroupPresentation(gens, relations)
    valid = sorted(phi for phi in pres.characters() if phi[M - 1] != 0)
    if variant >= len(valid):
        raise ValueError(f"only {len(valid)} characters with this conductor")
    on_gens = valid[variant]
    # values on pi^(i - depth) for i < e give the coefficient-linear form
    phi = tuple(on_gens[i] if i < M else Fraction(0) for i in range(F.e))
    chi = AdditiveCharacter(F, depth, conductor, phi, tuple(pres.invariants), {})
    edge = chi(FracElem(F.pi_power(M - 1, M + 1), depth))
    inside = chi(FracElem(F.pi_power(M, M + 1), depth))
    cert = {"nontrivial_at": f"pi^{conductor - 1}", "value": str(edge),
            "trivial_at": f"pi^{conductor}", "trivial_value": str(inside)}
    assert not edge.is_zero() and inside.is_zero()
    object.__setattr__(chi, "certificate", cert)
    return chi


# -- the parametrization ------------------------------------------------------------

def dual_shape(n: int, m: int, l: int) -> LatticeShape:
    """Lattice of parametrizing matrices: dual of the level-2n shape."""
    return LatticeShape(2 * n, m, l, DUAL)


def dual_matrix(F: FieldSpec, n: int, m: int, l: int, b, prec: int) -> Mat2:
    """A = pi^-2n (pi^-e b1, pi^-l b3; pi^-m b2, -pi^-e b1), residues lifted to ``prec``."""
    b = [x.lift(prec) if isinstance(x, TruncElem) and x.prec < prec else x for x in b]
    return dual_element(F, LatticeShape(2 * n, m, l), b, prec)


def eval_psi(A: Mat2, X: Mat2, chi: AdditiveCharacter, params: tuple | None = None) -> DyadicRotation:
    """chi(trace((X - 1) A)).  With ``params = (n, m, l)`` the shapes are checked."""
    if params is not None:
        n, m, l = params
        if not membership(X, G(n, m, l)):
            raise ShapeViolation(f"X is not in G{params}")
        if not in_lattice(A, dual_shape(n, m, l)):
            raise ShapeViolation(f"A is not in the dual shape of G{params}")
    D = X.integral().minus_identity().map(FracElem)
    return chi((D @ A).trace())


@dataclass(frozen=True)
class QuotientCharacter:
    params: tuple
    A: Mat2
    chi: AdditiveCharacter

    def __call__(self, X: Mat2) -> DyadicRotation:
        return eval_psi(self.A, X, self.chi, self.params)


def _working_precision(F: FieldSpec, n: int, m: int, l: int, prec: int | None) -> int:
    N = n_min(n, m, l, F.e)
    if prec is not None:
        if prec < N:
            raise ValueError(f"precision override {prec} below the minimum {N}")
        N = prec
    return N


def default_character(F: FieldSpec, n: int, m: int, l: int, variant: int = 0,
                      conductor: int = 0) -> AdditiveCharacter:
    return build_character(F, 2 * n + max(F.e, m, l), conductor, variant)


def dual_residues(F: FieldSpec, n: int):
    return list(product(list(F.residues(n)), repeat=3))


def psi_product_check(F: FieldSpec, A: Mat2, B: Mat2, n: int, m: int, l: int,
                      chi: AdditiveCharacter | None = None, prec: int | None = None) -> CheckReport:
    """psi_A + psi_B = psi_(A+B) over a full traversal of G(n,m,l)/G(2n,m,l)."""
    N = _working_precision(F, n, m, l, prec)
    chi = chi or default_character(F, n, m, l)
    report = CheckReport("psi_product", {"e": F.e, "n": n, "m": m, "l": l})
    reps = enumerate_cosets(F, G(n, m, l), G(2 * n, m, l)).lifted(N)
    S = A + B
    bad = 0
    for X in reps:
        lhs = eval_psi(A, X, chi) + eval_psi(B, X, chi)
        if lhs != eval_psi(S, X, chi):
            bad += 1
            report.record("additivity", False, {"X": str(X)})
    report.record("additivity", bad == 0)
    report.counts = {"cosets": len(reps), "mismatches": bad}
    return report


# -- the independent oracle ---------------------------------------------------------

@dataclass
class OracleResult:
    cosets: CosetSystem
    table: np.ndarray
    identity: int
    generators: list
    presentation: GroupPresentation | None
    words: list
    characters: list  # each a tuple of Fractions indexed by coset number
    abelian: bool
    closed: bool
    normal: bool


def _quotient(F: FieldSpec, n: int, m: int, l: int, cap: int):
    cosets = enumerate_cosets(F, G(n, m, l), G(2 * n, m, l), cap=cap)
    R = cosets.ring
    table = cosets.multiplication_table()
    # normality of G(2n) in G(n): X^-1 T X stays in T for every representative
    T = subgroup_image(R, G(2 * n, m, l))
    bounds = G(2 * n, m, l).bounds()
    from .tables import congruence_mask

    normal = True
    for k in range(cosets.index):
        x = tuple(np.full(len(T[0]), c[k], dtype=np.int32) for c in cosets.rep_batch)
        conj = batch_mul(R, batch_mul(R, batch_inverse_sl2(R, x), T), x)
        normal &= bool(np.all(congruence_mask(R, conj, bounds)))
    identity = cosets.locate(tuple(np.array([v], dtype=np.int32) for v in (R.one, R.zero, R.zero, R.one)))[0]
    return cosets, table, int(identity), normal


def enumerate_characters_oracle(F: FieldSpec, n: int, m: int, l: int,
                                cap: int = CHARACTER_CAP) -> OracleResult:
    """All homomorphisms G(n,m,l)/G(2n,m,l) -> Q/Z, from the multiplication table alone."""
    cosets, table, ident, normal = _quotient(F, n, m, l, cap)
    closed = bool((table >= 0).all()) and cosets.closed
    abelian = closed and bool(np.array_equal(table, table.T))
    if not closed:
        return OracleResult(cosets, table, ident, [], None, [], [], False, False, normal)
    size = cosets.index
    # greedy generating set: add any element outside the span so far
    gens: list[int] = []
    span = {ident}
    for h in range(size):
        if h in span:
            continue
        gens.append(h)
        frontier = deque(span)
        while frontier:
            x = frontier.popleft()
            for s in gens:
                y = int(table[x, s])
                if y not in span:
                    span.add(y)
                    frontier.append(y)
    # spanning tree words and Schreier relations
    k = len(gens)
    words: list = [None] * size
    words[ident] = (0,) * k
    frontier = deque([ident])
    while frontier:
        x = frontier.popleft()
        for j, s in enumerate(gens):
            y = int(table[x, s])
            if words[y] is None:
                w = list(words[x])
                w[j] += 1
                words[y] = tuple(w)
                frontier.append(y)
    relations = []
    for x in range(size):
        for j, s in enumerate(gens):
            y = int(table[x, s])
            rel = [a - b for a, b in zip(words[x], words[y])]
            rel[j] += 1
            if any(rel):
                relations.append(rel)
    if not gens:
        return OracleResult(cosets, table, ident, [], None, words, [(Fraction(0),) * size],
                            abelian, closed, normal)
    pres = GroupPresentation([str(g) for g in gens], relations)
    if pres.order > cap:
        raise Overflow(f"character group of order {pres.order} exceeds cap {cap}")
    chars = []
    for phi in pres.characters(cap):
        chars.append(tuple(sum((w * p for w, p in zip(words[h], phi)), Fraction(0)) % 1
                           for h in range(size)))
    return OracleResult(cosets, table, ident, gens, pres, words, chars, abelian, closed, normal)


# -- vectorized evaluation of every psi_A on batches of matrices -----------------------

class PsiTables:
    """psi_A(Z) for all dual residues A at once, over batches Z in SL_2(o/p^L).

    With E_1 = diag(1, -1) pi^(-2n-e), E_2 = pi^(-2n-m) in the lower-left
    slot and E_3 = pi^(-2n-l) in the upper-right slot, a dual residue is
    A = sum_k sum_i c_ki pi^i E_k and psi_A(Z) = sum c_ki chi(pi^i tr((Z-1) E_k)).
    Each term is chi(z pi^-t) for a single entry z of Z, read from a table.
    """

    def __init__(self, F: FieldSpec, n: int, m: int, l: int, chi: AdditiveCharacter, level: int):
        self.field, self.params, self.chi = F, (n, m, l), chi
        self.ring = R = residue_ring(F, level)
        e = F.e
        depths = {}
        for t in range(1 - chi.conductor, 2 * n + max(e, m, l) + 1):
            col = np.zeros(R.size, dtype=np.int64)
            for idx, z in enumerate(R.elements):
                r = chi(times_pi_power(z, -t)).as_fraction()
                col[idx] = (r.numerator * _VMOD) // r.denominator
            depths[t] = col
        self._depths = depths
        self.offsets = [(0, 2 * n + e), (1, 2 * n + m), (2, 2 * n + l)]
        self.residues = dual_residues(F, n)
        coeffs = []
        for b in self.residues:
            row = []
            for k in range(3):
                c = b[k].lift(max(n, 1)).coeffs
                row.extend(c[i] if i < len(c) else 0 for i in range(e))
            coeffs.append(row)
        self.coeffs = np.array(coeffs, dtype=np.int64)

    def _chi_table(self, t: int) -> np.ndarray:
        if t not in self._depths:  # chi is trivial on p^conductor
            return np.zeros(self.ring.size, dtype=np.int64)
        return self._depths[t]

    def rotations(self, Z) -> np.ndarray:
        """(len(Z), 3e) array of chi(pi^i tr((Z-1) E_k))."""
        R, e = self.ring, self.field.e
        a, b, c, d = Z
        entries = [R.sub(a, d), b, c]
        cols = []
        for k, base in self.offsets:
            for i in range(e):
                cols.append(self._chi_table(base - i)[entries[k]])
        return np.stack(cols, axis=1)

    def values(self, Z) -> np.ndarray:
        """(#A, len(Z)) array of psi_A(Z) scaled by 2^VALUE_BITS."""
        rot = self.rotations(Z)
        out = np.zeros((len(self.coeffs), rot.shape[0]), dtype=np.int64)
        for j in range(rot.shape[1]):
            out = (out + np.outer(self.coeffs[:, j], rot[:, j]) % _VMOD) % _VMOD
        return out

    def matrix(self, index: int, prec: int) -> Mat2:
        n, m, l = self.params
        return dual_matrix(self.field, n, m, l, self.residues[index], prec)


def _scaled(fr: Fraction) -> int:
    return (fr.numerator * _VMOD) // fr.denominator % _VMOD


def _cross(R, X, Y):
    """All products X_i Y_j, flattened row-major."""
    nx, ny = len(X[0]), len(Y[0])
    i, j = (v.ravel() for v in np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij"))
    return batch_mul(R, tuple(x[i] for x in X), tuple(y[j] for y in Y))


def verify_duality(F: FieldSpec, n: int, m: int, l: int, variant: int = 0,
                   prec: int | None = None, cap: int = CHARACTER_CAP,
                   conductor: int = 0) -> CheckReport:
    """Every psi_A is a character of G(n,m,l)/G(2n,m,l), and A -> psi_A is a
    bijection from dual residues onto the full character group."""
    e = F.e
    if n < 1 or not (-1 <= m <= e and -1 <= l <= e):
        raise HypothesisViolated(f"duality is claimed for n >= 1 and -1 <= m, l <= e; got "
                                 f"(n, m, l) = ({n}, {m}, {l}) with e = {e}")
    N = _working_precision(F, n, m, l, prec)
    report = CheckReport("duality", {"e": e, "n": n, "m": m, "l": l, "precision": N})
    chi = default_character(F, n, m, l, variant, conductor)
    if conductor:
        report.params["conductor"] = conductor
    report.notes.append(f"chi: conductor p^{chi.conductor}, certificate {chi.certificate}")

    oracle = enumerate_characters_oracle(F, n, m, l, cap)
    report.record("quotient_closed", oracle.closed,
                  None if oracle.closed else {"reason": f"G({n}, {m}, {l}) is not closed under products"})
    report.record("modulus_normal", oracle.normal)
    report.record("quotient_abelian", oracle.abelian)

    level = min(N, 10)
    tables = PsiTables(F, n, m, l, chi, level)
    R = tables.ring
    reps = mats_to_batch(R, oracle.cosets.lifted(level))
    deeper = enumerate_cosets(F, G(2 * n, m, l), G(2 * n + e, m, l))
    ys = mats_to_batch(R, deeper.lifted(level))
    H, Y = oracle.cosets.index, deeper.index

    base = tables.values(reps)                        # (#A, H)
    shifted = tables.values(_cross(R, reps, ys)).reshape(-1, H, Y)
    well_defined = np.all(shifted == base[:, :, None], axis=(1, 2))
    prods = tables.values(_cross(R, reps, reps)).reshape(-1, H, H)
    expected = (base[:, :, None] + base[:, None, :]) % _VMOD
    homomorphic = np.all(prods == expected, axis=(1, 2))
    is_char = well_defined & homomorphic

    for idx in np.nonzero(~well_defined)[0][:2]:
        report.record("well_defined", False, {"A": str(tables.matrix(int(idx), N))})
    report.record("well_defined", bool(well_defined.all()))
    for idx in np.nonzero(~homomorphic)[0][:2]:
        i, j = np.argwhere(prods[idx] != expected[idx])[0]
        X, Yb = oracle.cosets.lifted(N)[i], oracle.cosets.lifted(N)[j]
        report.record("homomorphism", False, {"A": str(tables.matrix(int(idx), N)),
                                              "X": str(X), "Y": str(Yb)})
    report.record("homomorphism", bool(homomorphic.all()))

    rows = {tuple(r) for r in base.tolist()}
    report.record("injective", len(rows) == len(tables.residues),
                  {"distinct": len(rows), "residues": len(tables.residues)})
    image = {tuple(r) for r, ok in zip(base.tolist(), is_char) if ok}
    oracle_set = {tuple(_scaled(v) for v in ch) for ch in oracle.characters}
    missing = len(oracle_set - image)
    report.record("surjective", oracle.closed and missing == 0,
                  {"missing": missing, "oracle": len(oracle_set)})
    sizes = {"cosets": H, "characters": len(oracle.characters),
             "dual_residues": len(tables.residues)}
    report.record("cardinality", oracle.closed and len(set(sizes.values())) == 1, sizes)
    report.counts = dict(sizes, psi_characters=int(is_char.sum()), psi_distinct=len(rows),
                         deeper_cosets=Y, evaluations=int(base.size + shifted.size + prods.size))
    return report


# -- equivariance ---------------------------------------------------------------------

def weyl(F: FieldSpec, prec: int) -> Mat2:
    return Mat2.from_ints(F, ((0, 1), (-1, 0)), prec)


def random_k_element(F: FieldSpec, prec: int, rng: random.Random) -> Mat2:
    def r():
        return F.elem([rng.randrange(2 ** 30) for _ in range(F.e)], prec)

    a, b, c, d = r(), r(), r(), r()
    if not a.is_unit() and not c.is_unit():
        c = c + 1
    return lift_sl2(F, a, b, c, d, prec)


def standard_conjugators(F: FieldSpec, prec: int, random_count: int = 20,
                         seed: int = 0) -> list[tuple[str, Mat2]]:
    three = F.elem(3, prec)
    out = [
        ("w", weyl(F, prec)),
        ("upper", Mat2.from_ints(F, ((1, 1), (0, 1)), prec)),
        ("lower", Mat2.from_ints(F, ((1, 0), (1, 1)), prec)),
        ("diag3", Mat2(three, F.zero(prec), F.zero(prec), invert_unit(three))),
    ]
    rng = random.Random(seed)
    out += [(f"random{i}", random_k_element(F, prec, rng)) for i in range(random_count)]
    return out


def conjugate_dual(A: Mat2, g: Mat2) -> Mat2:
    """``g A g^-1``, the action that makes psi_A(X^g) = psi_(A^g)(X)."""
    gi = g.inverse()
    return g.map(FracElem) @ A @ gi.map(FracElem)


def equivariance_check(F: FieldSpec, n: int, m: int, l: int, conjugators=None,
                       chi: AdditiveCharacter | None = None, prec: int | None = None,
                       seed: int = 0) -> CheckReport:
    """psi_A(g^-1 X g) = psi_(g A g^-1)(X) over a full coset traversal and all A."""
    N = _working_precision(F, n, m, l, prec) + 2
    chi = chi or default_character(F, n, m, l)
    report = CheckReport("equivariance", {"e": F.e, "n": n, "m": m, "l": l, "precision": N})
    if conjugators is None:
        conjugators = standard_conjugators(F, N, seed=seed)
        report.params["seed"] = seed
    reps = enumerate_cosets(F, G(n, m, l), G(2 * n, m, l)).lifted(N)
    As = [dual_matrix(F, n, m, l, b, N) for b in dual_residues(F, n)]
    mismatches = evaluations = kept = swapped = left = 0
    for name, g in conjugators:
        g = g.at(N)
        conj_X = [X.conjugate(g) for X in reps]
        for Xg in conj_X:
            if membership(Xg, G(n, m, l)):
                kept += 1
            elif membership(Xg, G(n, l, m)):
                swapped += 1
            else:
                left += 1
        for A in As:
            Ag = conjugate_dual(A, g)
            for X, Xg in zip(reps, conj_X):
                evaluations += 1
                if eval_psi(A, Xg, chi) != eval_psi(Ag, X, chi):
                    mismatches += 1
                    report.record("identity", False, {"g": name, "A": str(A), "X": str(X)})
    report.record("identity", mismatches == 0)
    report.counts = {"conjugators": len(conjugators), "cosets": len(reps), "dual_residues": len(As),
                     "evaluations": evaluations, "mismatches": mismatches,
                     "shape_kept": kept, "shape_swapped": swapped, "shape_left": left}
    return report
