"""
The trace pairing
=================

For trace-zero B in (p^n, p^(n+m); p^(n+l), p^n) and trace-zero A in the
dual lattice, trace(BA) is integral and equals a1 b1 / u + a2 b2 + a3 b3.
"""

# %%
from sl2dyadic import LatticeShape, make_field, trace_pair
from sl2dyadic.matrices import closed_form_check, closed_form_pair, dual_element, lattice_element, nondegeneracy_check

F = make_field(2, [-6, 0, 1], 12)     # u = 3, so the 1/u really shows
shape = LatticeShape(1, 1, 0)
a = [F.elem(x) for x in (5, 2, 7)]
b = [F.elem(x) for x in (3, 1, 1)]
B = lattice_element(F, shape, a, 12)
A = dual_element(F, shape, b, 12)
print("trace(BA)     =", trace_pair(B, A, shape))
print("closed form   =", closed_form_pair(a, b, F.u))

# %%
r = closed_form_check(F, 1, 1, 0, samples=2000)
print(r.line(), r.counts)

# %%
# Non-degeneracy modulo p, in both argument orders.
for params in [(1, 0, 0), (1, 2, 2)]:
    r = nondegeneracy_check(F, *params, samples=100)
    print(r.line(), {k: v for k, v in r.checks.items()})
