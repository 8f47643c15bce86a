"""Truncated arithmetic in the ring of integers of a totally ramified
extension of Q_2.

The field is ``F = Q_2(pi)`` where ``pi`` is a root of an Eisenstein
polynomial ``E`` of degree ``e``.  Its ring of integers is
``o = Z_2[pi]`` and every element of ``o / p^N`` has a unique coefficient
vector ``(a_0, ..., a_{e-1})`` with ``a_i`` reduced modulo
``2**ceil((N - i) / e)``.  Because the valuations ``e*v_2(a_i) + i`` of
the individual terms are pairwise distinct modulo ``e``, the valuation of
a sum is the minimum over its terms, so equality modulo ``p^N`` is plain
equality of these canonical vectors.

>>> F = make_field(2, [-2, 0, 1], 8)     # pi**2 = 2
>>> pi = F.pi()
>>> pi * pi == F.elem(2)
True
>>> F.elem(2).valuation()
2
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence, Union

from .errors import (
    NotAUnit,
    NotEisenstein,
    PrecisionExhausted,
    PrecisionMismatch,
    PrecisionTooSmall,
)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def v2(x: int) -> int:
    """2-adic valuation of a nonzero integer."""
    return (x & -x).bit_length() - 1


@lru_cache(maxsize=None)
def _moduli(e: int, prec: int) -> tuple:
    return tuple(1 << max(0, _ceil_div(prec - i, e)) for i in range(e))


@dataclass(frozen=True)
class AtLeast:
    """Valuation marker for an element indistinguishable from zero."""

    bound: int

    def __repr__(self):
        return f"AtLeast({self.bound})"


Valuation = Union[int, AtLeast]


@dataclass(frozen=True)
class FieldSpec:
    """A totally ramified extension of Q_2 given by an Eisenstein polynomial.

    ``eisenstein`` lists the coefficients constant term first; the last
    one is the leading coefficient 1.  ``precision`` is only the default
    working precision for elements created through this object and does
    not take part in equality.
    """

    e: int
    eisenstein: tuple
    precision: int = dc_field(default=8, compare=False)

    @property
    def u_coeffs(self) -> tuple:
        # pi^e = -(c_0 + ... + c_{e-1} pi^{e-1}) and every c_i is even
        return tuple(-c // 2 for c in self.eisenstein[:-1])

    @property
    def u(self) -> "TruncElem":
        """The unit pi**e / 2 at the default precision."""
        return self.elem(self.u_coeffs)

    def _prec(self, prec):
        return self.precision if prec is None else prec

    def elem(self, value, prec: int | None = None) -> "TruncElem":
        if isinstance(value, int):
            value = (value,)
        coeffs = tuple(value) + (0,) * (self.e - len(value))
        if len(coeffs) != self.e:
            raise ValueError(f"expected at most {self.e} coefficients, got {len(value)}")
        return TruncElem(self, coeffs, self._prec(prec))

    def zero(self, prec=None):
        return self.elem(0, prec)

    def one(self, prec=None):
        return self.elem(1, prec)

    def pi(self, prec=None) -> "TruncElem":
        if self.e == 1:
            return self.elem(-self.eisenstein[0], prec)
        return self.elem((0, 1), prec)

    def pi_power(self, k: int, prec=None) -> "TruncElem":
        if k < 0:
            raise ValueError("negative powers of pi live in FracElem")
        return self.pi(prec) ** k

    def residues(self, prec: int) -> Iterator["TruncElem"]:
        """All elements of o/p^prec, ordered by ``residue_index``."""
        mods = _moduli(self.e, prec)
        for combo in product(*(range(m) for m in reversed(mods))):
            yield TruncElem(self, tuple(reversed(combo)), prec)

    def ideal_residues(self, k: int, prec: int) -> Iterator["TruncElem"]:
        """Representatives of p^k / p^prec (k <= prec)."""
        pk = self.pi_power(k, prec)
        for r in self.residues(prec - k):
            yield r.lift(prec) * pk

    def __str__(self):
        terms = " + ".join(f"{c}x^{i}" for i, c in enumerate(self.eisenstein) if c)
        return f"Q2[x]/({terms})"


def make_field(e: int, eisenstein: Sequence[int], N: int) -> FieldSpec:
    """Validate an Eisenstein polynomial and return its FieldSpec."""
    coeffs = tuple(int(c) for c in eisenstein)
    if e < 1 or len(coeffs) != e + 1:
        raise NotEisenstein(f"need {e + 1} coefficients for degree {e}, got {len(coeffs)}")
    if coeffs[-1] != 1:
        raise NotEisenstein("polynomial must be monic")
    if any(c % 2 for c in coeffs[:-1]):
        raise NotEisenstein("non-leading coefficients must be even")
    if coeffs[0] == 0 or v2(coeffs[0]) != 1:
        raise NotEisenstein("constant term must have 2-adic valuation exactly 1")
    if N < e:
        raise PrecisionTooSmall(f"precision {N} is below the ramification index {e}")
    F = FieldSpec(e, coeffs, N)
    if not F.u.is_unit():
        raise NotEisenstein("pi^e/2 is not a unit")
    return F


def q2(N: int = 8) -> FieldSpec:
    """Q_2 itself, with pi = 2."""
    return make_field(1, [-2, 1], N)


def sqrt2_field(N: int = 8) -> FieldSpec:
    """Q_2(pi) with pi**2 = 2."""
    return make_field(2, [-2, 0, 1], N)


@dataclass(frozen=True)
class TruncElem:
    field: FieldSpec
    coeffs: tuple
    prec: int

    def __post_init__(self):
        if self.prec < 0:
            raise PrecisionExhausted(f"negative precision {self.prec}")
        mods = _moduli(self.field.e, self.prec)
        object.__setattr__(self, "coeffs", tuple(a % m for a, m in zip(self.coeffs, mods)))

    # -- plumbing ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, int):
            return self.field.elem(other, self.prec)
        if not isinstance(other, TruncElem):
            return None
        if other.field != self.field:
            raise ValueError("operands belong to different fields")
        if other.prec != self.prec:
            raise PrecisionMismatch(f"precision {self.prec} vs {other.prec}")
        return other

    def _new(self, coeffs):
        return TruncElem(self.field, coeffs, self.prec)

    def reduce(self, prec: int) -> "TruncElem":
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} -> {prec} by reduction")
        return TruncElem(self.field, self.coeffs, prec)

    def lift(self, prec: int) -> "TruncElem":
        """Canonical lift (same integer coefficients) to a higher precision."""
        if prec < self.prec:
            raise ValueError("lift target below current precision")
        return TruncElem(self.field, self.coeffs, prec)

    def at(self, prec: int) -> "TruncElem":
        return self.lift(prec) if prec >= self.prec else self.reduce(prec)

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return self._new(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(_poly_mulmod(self.field, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return invert_unit(self) ** (-k)
        result, base = self.field.one(self.prec), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- valuation --------------------------------------------------------
    def valuation(self) -> Valuation:
        e = self.field.e
        best = None
        for i, a in enumerate(self.coeffs):
            if a:
                v = e * v2(a) + i
                if best is None or v < best:
                    best = v
        return AtLeast(self.prec) if best is None else best

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return self.prec == 0 or bool(self.coeffs[0] & 1)

    def val_at_least(self, k: int) -> bool:
        """Decide ``val(self) >= k``; raises when precision cannot tell."""
        if k <= 0:
            return True
        v = self.valuation()
        if isinstance(v, AtLeast):
            if k <= self.prec:
                return True
            raise PrecisionTooSmall(f"zero at precision {self.prec} cannot certify valuation >= {k}")
        return v >= k

    def __str__(self):
        if self.field.e == 1:
            return f"{self.coeffs[0]} mod 2^{self.prec}"
        terms = [f"{c}" if i == 0 else f"{c}*pi^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"({' + '.join(terms) or '0'}) mod pi^{self.prec}"


def _poly_mulmod(F: FieldSpec, x: tuple, y: tuple) -> list:
    e = F.e
    prod = [0] * (2 * e - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                prod[i + j] += a * b
    c = F.eisenstein
    for t in range(2 * e - 2, e - 1, -1):
        q = prod[t]
        if q:
            for i in range(e):
                prod[t - e + i] -= q * c[i]
    return prod[:e]


# Free-function forms of the operators.
def add(a: TruncElem, b: TruncElem) -> TruncElem:
    return a + b


def mul(a: TruncElem, b: TruncElem) -> TruncElem:
    return a * b


def valuation(a) -> Valuation:
    return a.valuation()


def invert_unit(a: TruncElem) -> TruncElem:
    """Inverse of a unit by Newton iteration ``x <- x(2 - a x)``.

    The residue field is F_2, so every unit is 1 mod p and ``x = 1`` is
    already correct to precision 1; each step doubles the precision.
    """
    if not a.is_unit():
        raise NotAUnit(f"{a} has positive valuation")
    one = a.field.one(a.prec)
    x = one
    for _ in range(a.prec.bit_length() + 2):
        ax = a * x
        if ax == one:
            return x
        x = x * (2 - ax)
    raise AssertionError("Newton iteration failed to converge")  # pragma: no cover


@lru_cache(maxsize=None)
def _u_inverse_power(F: FieldSpec, q: int, prec: int) -> TruncElem:
    return invert_unit(F.elem(F.u_coeffs, prec)) ** q


def divide_by_pi_power(x: TruncElem, k: int) -> TruncElem:
    """Exact quotient x / pi**k for ``val(x) >= k``; precision drops by k.

    Uses pi**(eQ) = (2u)**Q with Q = ceil(k/e): multiply by
    pi**(eQ-k) * u**-Q, after which every coefficient is divisible by 2**Q.
    """
    if k == 0:
        return x
    if not x.val_at_least(k):
        raise ValueError(f"valuation of {x} is below {k}")
    F = x.field
    Q = _ceil_div(k, F.e)
    t = F.e * Q - k
    P = x.prec + t
    y = x.lift(P) * F.pi_power(t, P) * _u_inverse_power(F, Q, P)
    div = 1 << Q
    assert all(c % div == 0 for c in y.coeffs)
    return TruncElem(F, tuple(c // div for c in y.coeffs), x.prec - k)


def multiply_by_pi_power(x: TruncElem, k: int) -> TruncElem:
    """x * pi**k, gaining k digits of precision."""
    P = x.prec + k
    return x.lift(P) * x.field.pi_power(k, P)


@dataclass(frozen=True)
class FracElem:
    """``num * pi**(-shift)``, known modulo ``p**(num.prec - shift)``.

    The constructor normalizes so that the shift is as small as possible,
    dividing ``num`` by powers of pi; this leaves the absolute precision
    unchanged.
    """

    num: TruncElem
    shift: int = 0

    def __post_init__(self):
        num, s = self.num, self.shift
        if s < 0:
            num, s = multiply_by_pi_power(num, -s), 0
        if s > 0:
            v = num.valuation()
            v = num.prec if isinstance(v, AtLeast) else v
            k = min(v, s)
            if k:
                num, s = divide_by_pi_power(num, k), s - k
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "shift", s)

    @classmethod
    def make(cls, F: FieldSpec, value, shift: int, abs_prec: int) -> "FracElem":
        """Element ``value * pi**-shift`` known modulo ``p**abs_prec``."""
        return cls(F.elem(value, abs_prec + shift), shift)

    @property
    def field(self):
        return self.num.field

    @property
    def abs_prec(self) -> int:
        return self.num.prec - self.shift

    def valuation(self) -> Valuation:
        if self.num.is_zero():
            return AtLeast(self.abs_prec)
        return self.num.valuation() - self.shift

    def is_integral(self) -> bool:
        return self.shift == 0

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def val_at_least(self, k: int) -> bool:
        v = self.valuation()
        if isinstance(v, AtLeast):
            if k <= v.bound:
                return True
            raise PrecisionTooSmall(f"zero known only mod p^{v.bound}, cannot certify valuation >= {k}")
        return v >= k

    def to_trunc(self, prec: int | None = None) -> TruncElem:
        if self.shift:
            if self.num.is_zero():
                raise PrecisionExhausted("element known only modulo a fractional ideal")
            raise ValueError(f"element has negative valuation {self.valuation()}")
        if prec is None:
            return self.num
        if prec > self.num.prec:
            raise PrecisionExhausted(f"requested precision {prec}, have {self.num.prec}")
        return self.num.reduce(prec)

    def _coerce(self, other):
        if isinstance(other, FracElem):
            return other
        if isinstance(other, TruncElem):
            return FracElem(other)
        if isinstance(other, int):
            return FracElem(self.field.elem(other, max(self.num.prec, self.abs_prec)))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        s = max(self.shift, o.shift)
        absp = min(self.abs_prec, o.abs_prec)
        P = s + absp
        if P < 0:
            raise PrecisionExhausted("sum is unknown at every precision")

        def aligned(x):
            d = s - x.shift
            return multiply_by_pi_power(x.num.reduce(max(0, P - d)), d).at(P) if P >= d else x.num.field.zero(P)

        return FracElem(aligned(self) + aligned(o), s)

    __radd__ = __add__

    def __neg__(self):
        return FracElem(-self.num, self.shift)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        vx, vy = self.num.valuation(), o.num.valuation()
        vx = self.num.prec if isinstance(vx, AtLeast) else vx
        vy = o.num.prec if isinstance(vy, AtLeast) else vy
        P = min(vx + o.num.prec, vy + self.num.prec)
        return FracElem(self.num.at(P) * o.num.at(P), self.shift + o.shift)

    __rmul__ = __mul__

    def __str__(self):
        if self.shift == 0:
            return str(self.num)
        return f"pi^-{self.shift}*{self.num}"


def frac_add(a: FracElem, b: FracElem) -> FracElem:
    return a + b


def frac_mul(a: FracElem, b: FracElem) -> FracElem:
    return a * b


def frac_val(a: FracElem) -> Valuation:
    return a.valuation()


def n_min(n: int, m: int, l: int, e: int) -> int:
    """Default working precision for theorem checks at parameters (n, m, l)."""
    return 2 * n + e + max(m, l, e, 0) + 1
