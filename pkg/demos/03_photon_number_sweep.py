"""
Width against photon number
===========================

The (N,0) feature narrows as N grows, approaching 2/sqrt(N) times the
two-photon width.  Balanced and near-balanced outcomes behave differently.
"""

# %%
import numpy as np

from fockhom import Family, ratio_sweep

# %%
n0 = ratio_sweep(40, Family.N0)
scaled = n0.ratios() * np.sqrt(n0.photon_numbers()) / 2
for row, s in zip(n0.rows, scaled):
    print(f"N={row.N:2d}  ratio={row.ratio:.6f}  2/sqrt(N)={row.asymptote:.6f}  scaled={s:.5f}")

# %% [markdown]
# The scaled ratio is below one for N <= 6, peaks near N = 10 and then
# decreases towards one from above.

# %%
for family in (Family.HALF, Family.HALFP1, Family.HALFP2):
    table = ratio_sweep(16, family)
    print(family.value, [(r.N, round(r.ratio, 4)) for r in table.rows])
    for N, why in table.skipped:
        print("   skipped", N, why)
