"""
Cross-check against a dense Fock-space simulation
=================================================

The exact pipeline expands creation operators symbolically.  The oracle
instead builds the full four-mode Fock space, exponentiates the beam-splitter
generator and reads off port distributions.  The two should agree to
rounding error.
"""

# %%
from fractions import Fraction

from fockhom import OutcomeSpec, coefficients
from fockhom.oracle import oracle_probability

# %%
worst = 0.0
for N in (2, 4, 6, 8):
    for m in range(N + 1):
        poly = coefficients(OutcomeSpec(N, m))
        for I in (0.0, 0.25, 0.5, 0.75, 1.0):
            worst = max(worst, abs(oracle_probability(N, m, I=I) - float(poly(Fraction(I)))))
print(f"largest disagreement for N <= 8: {worst:.2e}")
