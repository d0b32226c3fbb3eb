"""
Detection probabilities as polynomials in the indistinguishability
==================================================================

Two twin Fock inputs meet on a balanced beam splitter.  For every detection
outcome the probability is a polynomial in I with exact rational coefficients.
"""

# %%
from fractions import Fraction

from fockhom import OutcomeSpec, coefficients, coefficients_closed_form_N0, type_weight
from fockhom.decomposition import type_probabilities

# %% [markdown]
# The two- and four-photon table.  c_0 is the classical (distinguishable)
# value, and the sum of all c_k is the fully indistinguishable value.

# %%
for N in (2, 4):
    for m in range(N // 2 + 1):
        poly = coefficients(OutcomeSpec(N, m))
        print(f"{OutcomeSpec(N, m).label:>7}", "  ".join(f"{c!s:>6}" for c in poly.coeffs))

# %% [markdown]
# Where the coefficients come from: the delayed input splits into types d,
# with d photons in b orthogonal to those in a.  Each type has a binomial
# weight W_d(I) and its own outcome probabilities p_d.

# %%
N, m = 4, 0
for d in range(N // 2 + 1):
    print(f"d={d}  W_d={[str(c) for c in type_weight(N, d).coeffs]}  p_d={type_probabilities(N, d)[m]}")

# %% [markdown]
# For the all-in-one-port outcome the coefficients are squared binomials.

# %%
for N in (6, 8, 10):
    print(N, [str(c) for c in coefficients_closed_form_N0(N).coeffs])

# %%
print("P(4,0) at I=1/2:", coefficients(OutcomeSpec(4, 0))(Fraction(1, 2)))
