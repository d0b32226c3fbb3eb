"""Exact multi-photon interference of twin Fock states on a beam splitter."""

__version__ = "0.1.0"

from .decomposition import (  # noqa: E402
    IndistPolynomial,
    OutcomeSpec,
    coefficients,
    coefficients_closed_form_N0,
    direct_probability,
    per_type_probability,
    type_weight,
)
from .signal import (  # noqa: E402
    Family,
    GaussianSource,
    enhancement,
    feature_fwhm,
    probability_curve,
    ratio_sweep,
)
from .fitting import FitModelParams, ScanData, fit, model_counts, synth_scan  # noqa: E402
