"""
Characters of G(n,m,l) / G(2n,m,l)
==================================

psi_A(X) = chi(trace((X - 1) A)) is compared with the full character group,
which an oracle computes from the multiplication table alone.  The
comparison is exact: values are dyadic rationals modulo 1.
"""

# %%
from sl2dyadic import Mat2, enumerate_characters_oracle, eval_psi, q2, verify_duality
from sl2dyadic.characters import default_character, dual_matrix

F = q2(12)
oracle = enumerate_characters_oracle(F, 1, 0, 0)
print("cosets:", oracle.cosets.index, " characters:", len(oracle.characters),
      " invariants:", oracle.presentation.cyclic_factors)

# %%
# At n = 1 psi_A is not always a homomorphism.  A three-line witness:
chi = default_character(F, 1, 0, 0)
X = Mat2.from_ints(F, ((1, 2), (0, 1)), 8)
Y = Mat2.from_ints(F, ((1, 0), (2, 1)), 8)
A = dual_matrix(F, 1, 0, 0, (1, 0, 0), 8)          # diag(1/8, -1/8)
print("psi(X) =", eval_psi(A, X, chi), " psi(Y) =", eval_psi(A, Y, chi),
      " psi(XY) =", eval_psi(A, X @ Y, chi))
# the defect is chi(trace((X-1)(Y-1)A)) = chi(1/2)

# %%
# The full verdicts.  Note which sub-checks fail.
for params in [(1, 0, 0), (1, 1, 0), (1, -1, 0)]:
    r = verify_duality(F, *params)
    print(r.line(), {k: v for k, v in r.checks.items() if not v})

# %%
# At n = 2 over Q_2 the parametrization is a bijection for m + l >= 1.
for params in [(2, 1, 0), (2, 1, 1), (2, 0, 0)]:
    r = verify_duality(F, *params)
    print(r.line(), r.counts["psi_characters"], "of", r.counts["characters"])
