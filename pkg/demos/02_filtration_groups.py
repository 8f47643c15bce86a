"""
Filtration subgroups and the projective line
============================================

Subgroups of SL_2(o) are described by valuation bounds on X - 1.  All
quotients are computed exactly inside SL_2(o/p^L).
"""

# %%
from sl2dyadic import G, K, K_n, Mat2, enumerate_cosets, normality_check, q2, sqrt2_field, theta
from sl2dyadic.projline import ProjPoint, act, points, transitivity_check, verify_stabilizer

F = q2(10)
print("|K / K_1| =", enumerate_cosets(F, K(), K_n(1)).index)
cs = enumerate_cosets(F, G(1, 0, 0), G(2, 0, 0))
print("|G(1,0,0) / G(2,0,0)| =", cs.index)

# %%
# X -> X - 1 turns this quotient into (o/p)^3: products become sums.
X = Mat2.from_ints(F, ((1, 2), (0, 1)))
Y = Mat2.from_ints(F, ((1, 0), (2, 1)))
print("theta(X) + theta(Y) =", theta(X, 1, 0, 0) + theta(Y, 1, 0, 0))
print("theta(XY)           =", theta(X @ Y, 1, 0, 0))

# %%
# K_n^m is normal in K when e, n >= m.  Over Q_2(sqrt 2) that allows m = 2.
F2 = sqrt2_field(10)
for field, n, m in [(F, 1, 1), (F, 2, 1), (F2, 2, 2)]:
    print(normality_check(field, n, m).line())

# %%
# Outside that range the check still runs but is labelled.
r = normality_check(F, 2, 2)
print(r.line(), "failures:", r.counts["failures"])

# %%
# The projective line over o/p^n has 2^n + 2^(n-1) points, one K-orbit.
for n in (1, 2, 3):
    print(f"n={n}: {len(points(F, n))} points, transitive: {transitivity_check(F, n).passed}")
w = Mat2.from_ints(F, ((0, 1), (-1, 0)))
print("w [1:0]_3 =", act(w, ProjPoint.make(F, 1, 0, 3)))
print(verify_stabilizer(F, 2).line(), verify_stabilizer(F, 2).counts)
