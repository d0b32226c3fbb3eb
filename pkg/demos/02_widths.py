"""
Multi-photon coherence times
============================

A Gaussian spectrum gives I(tau) = exp(-4 ln2 tau^2 / dtau^2).  Each outcome
shows a peak or dip whose width depends on which powers of I it contains.
"""

# %%
import numpy as np

from fockhom import GaussianSource, OutcomeSpec, enhancement, feature_fwhm, probability_curve

source = GaussianSource.from_delta_tau(379.0)  # fs

# %%
for N, m in [(2, 0), (2, 1), (4, 0), (4, 1), (4, 2)]:
    rep = feature_fwhm(OutcomeSpec(N, m), source)
    print(f"{rep.spec.label:>6}  {rep.feature_kind.value:4}  fwhm={rep.fwhm:8.3f} fs"
          f"  ratio={rep.ratio_to_11:.6f}  enhancement={rep.enhancement}")

# %% [markdown]
# (3,1) contains only I^2, so it is exactly 1/sqrt2 narrower.  (4,0) mixes I
# and I^2 and lands in between.  Bunching into one port is enhanced
# six-fold at zero delay relative to distinguishable photons.

# %%
print(enhancement(OutcomeSpec(4, 0)), 1 / np.sqrt(2))

# %%
curve = probability_curve(OutcomeSpec(4, 0), source, np.linspace(-900, 900, 13))
for tau, p in zip(curve.tau, curve.probability):
    print(f"{tau:7.1f}  {p:.6f}  {'#' * int(p * 200)}")
