"""
Arithmetic in a ramified 2-adic ring
====================================

Elements of o/p^N are stored as canonical coefficient vectors.  This walk
through builds two fields, checks a few identities and shows how
fractional elements keep track of what they still know.
"""

# %%
# Two fields: Q_2 itself and Q_2(pi) with pi^2 = 2.
from sl2dyadic import FracElem, invert_unit, make_field, q2, sqrt2_field

F1 = q2(8)
F2 = sqrt2_field(8)
print(F1, "  e =", F1.e)
print(F2, "  e =", F2.e)

# %%
# pi^e / 2 is always a unit.  With pi^2 = 6 it is 3.
F6 = make_field(2, [-6, 0, 1], 8)
print("u for pi^2 = 6:", F6.u)

# %%
# Valuations count powers of pi, so 2 has valuation e.
for F in (F1, F2):
    print(f"e={F.e}: val(2) = {F.elem(2).valuation()}, val(6) = {F.elem(6).valuation()}")
print("val(0) at precision 8:", F2.zero().valuation())

# %%
# Units invert by Newton iteration.
x = F2.elem((1, 1))          # 1 + pi
y = invert_unit(x)
print(f"(1 + pi)^-1 = {y};  check: {x * y}")

# %%
# Fractional elements: 1/pi^3 known modulo p^4.  Sums keep the weaker precision.
a = FracElem.make(F2, 1, 3, 4)
b = FracElem.make(F2, 1, 1, 6)
print("a =", a, " val", a.valuation(), " known mod p^", a.abs_prec)
print("a + b known mod p^", (a + b).abs_prec)
