"""Delay-domain interference signals for photons with a Gaussian spectrum.

For a Gaussian spectrum of bandwidth ``delta_omega`` the indistinguishability
of two photons delayed by ``tau`` is ``exp(-delta_omega**2 tau**2 / 2)``, whose
FWHM is ``delta_tau = sqrt(8 ln 2) / delta_omega``.  The ``k``-th power has a
width smaller by ``sqrt(k)``, so an outcome whose coefficient polynomial mixes
several powers has its own characteristic coherence time.

Units are whatever the caller uses consistently (seconds and rad/s in the
docstrings); all width ratios are dimensionless.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .decomposition import (
    IndistPolynomial,
    OutcomeSpec,
    coefficients,
    coefficients_closed_form_N0,
)

__all__ = [
    "FWHM_FACTOR",
    "GaussianSource",
    "SignalCurve",
    "WidthReport",
    "FeatureKind",
    "Family",
    "SweepRow",
    "SweepTable",
    "indistinguishability",
    "power_fwhm",
    "probability_curve",
    "feature_fwhm",
    "enhancement",
    "ratio_sweep",
]

FWHM_FACTOR = math.sqrt(8 * math.log(2))
# outcomes with N above this use the binomial-square closed form in sweeps
FAST_PATH_MIN_N = 22


@dataclass(frozen=True)
class GaussianSource:
    delta_omega: float
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if not self.delta_omega > 0:
            raise ValueError(f"bandwidth must be positive, got {self.delta_omega}")
        if not 0 < self.visibility <= 1:
            raise ValueError(f"visibility must lie in (0, 1], got {self.visibility}")

    @classmethod
    def from_delta_tau(cls, delta_tau: float, visibility: float = 1.0) -> "GaussianSource":
        if not delta_tau > 0:
            raise ValueError(f"coherence time must be positive, got {delta_tau}")
        return cls(FWHM_FACTOR / delta_tau, visibility)

    @property
    def delta_tau(self) -> float:
        return FWHM_FACTOR / self.delta_omega


def indistinguishability(tau, source: GaussianSource):
    """``v * exp(-delta_omega**2 tau**2 / 2)``; scalar in, scalar out."""
    tau = np.asarray(tau, dtype=float)
    out = source.visibility * np.exp(-0.5 * (source.delta_omega * tau) ** 2)
    return float(out) if out.ndim == 0 else out


def power_fwhm(k: int, source: GaussianSource) -> float:
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    return source.delta_tau / math.sqrt(k)


@dataclass(frozen=True)
class SignalCurve:
    spec: OutcomeSpec
    source: GaussianSource
    tau: np.ndarray
    probability: np.ndarray

    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.tau.tolist(), self.probability.tolist()))


def _float_coeffs(coeffs: Union[IndistPolynomial, Sequence]) -> np.ndarray:
    if isinstance(coeffs, IndistPolynomial):
        coeffs = coeffs.coeffs
    return np.array([float(c) for c in coeffs])


def _evaluate(c: np.ndarray, x):
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for ck in c[::-1]:
        acc = acc * x + ck
    return acc


def probability_curve(spec: OutcomeSpec, source: GaussianSource, grid) -> SignalCurve:
    tau = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(tau)):
        raise ValueError("delay grid must be finite")
    c = _float_coeffs(coefficients(spec))
    prob = _evaluate(c, indistinguishability(tau, source))
    return SignalCurve(spec, source, tau, np.atleast_1d(prob))


class FeatureKind(str, enum.Enum):
    PEAK = "peak"
    DIP = "dip"
    FLAT = "flat"


@dataclass(frozen=True)
class WidthReport:
    spec: OutcomeSpec
    fwhm: Optional[float]
    ratio_to_11: Optional[float]
    enhancement: Optional[float]
    feature_kind: FeatureKind


def _outer_half_crossing(c: np.ndarray, source: GaussianSource, rtol: float = 1e-13) -> Optional[float]:
    """Largest ``tau >= 0`` where ``|P(tau) - c_0|`` equals half its value at ``tau = 0``."""
    v = source.visibility
    dev_coeffs = c.copy()
    dev_coeffs[0] = 0.0
    dev_coeffs *= v ** np.arange(len(c))

    def feature(tau):
        x = np.exp(-0.5 * (source.delta_omega * np.asarray(tau)) ** 2)
        return np.abs(_evaluate(dev_coeffs, x))

    f0 = float(feature(0.0))
    scale = float(np.sum(np.abs(dev_coeffs)))
    if scale == 0 or f0 <= 1e-14 * scale:
        return None
    half = 0.5 * f0
    # beyond tau_max the feature is bounded by scale * x < half / 100
    x_min = half / (100 * scale)
    tau_max = math.sqrt(2 * math.log(1 / x_min)) / source.delta_omega
    grid = np.linspace(0.0, tau_max, 4097)
    above = np.nonzero(feature(grid) >= half)[0]
    lo, hi = grid[above[-1]], grid[above[-1] + 1]
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if feature(mid) >= half:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def _width_report(spec: OutcomeSpec, coeffs: IndistPolynomial, source: GaussianSource) -> WidthReport:
    c = _float_coeffs(coeffs)
    v = source.visibility
    p0 = float(_evaluate(c * v ** np.arange(len(c)), 1.0))
    c0 = float(c[0])
    crossing = _outer_half_crossing(c, source)
    if crossing is None:
        kind = FeatureKind.FLAT
        return WidthReport(spec, None, None, p0 / c0 if c0 else None, kind)
    kind = FeatureKind.PEAK if p0 > c0 else FeatureKind.DIP
    fwhm = 2 * crossing
    return WidthReport(spec, fwhm, fwhm / source.delta_tau, p0 / c0 if c0 else None, kind)


def feature_fwhm(spec: OutcomeSpec, source: GaussianSource) -> WidthReport:
    """FWHM of the deviation ``|P(tau) - c_0|`` from the distinguishable baseline.

    The outermost half-crossing is used, so non-monotone features (mixed-sign
    polynomials) still get a well-defined width.  ``ratio_to_11`` divides by the
    single-photon coherence time, which is also the two-photon width.
    """
    return _width_report(spec, coefficients(spec), source)


def enhancement(spec: OutcomeSpec, visibility: float = 1.0) -> Union[Fraction, float]:
    """Signal at zero delay over the fully distinguishable baseline.

    Exact :class:`~fractions.Fraction` at unit visibility.
    """
    c = coefficients(spec).coeffs
    if c[0] == 0:
        raise ZeroDivisionError(f"baseline c_0 vanishes for {spec.label}")
    if visibility == 1:
        return sum(c, Fraction(0)) / c[0]
    return sum(float(ck) * visibility**k for k, ck in enumerate(c)) / float(c[0])


class Family(str, enum.Enum):
    """Outcome families of the photon-number sweep."""

    N0 = "N0"  # (N, 0)
    HALF = "half"  # (N/2, N/2)
    HALFP1 = "halfp1"  # (N/2+1, N/2-1), plotted for even N/2
    HALFP2 = "halfp2"  # (N/2+2, N/2-2), plotted for odd N/2

    def outcome(self, N: int) -> Tuple[Optional[OutcomeSpec], str]:
        half = N // 2
        if self is Family.N0:
            return OutcomeSpec(N, 0), ""
        if self is Family.HALF:
            return OutcomeSpec(N, half), ""
        if self is Family.HALFP1:
            if half % 2:
                return None, "N/2 odd; family defined for even N/2"
            return OutcomeSpec(N, half - 1), ""
        if half % 2 == 0:
            return None, "N/2 even; family defined for odd N/2"
        if half < 2:
            return None, "N/2 < 2 leaves no photons for the second port"
        return OutcomeSpec(N, half - 2), ""


@dataclass(frozen=True)
class SweepRow:
    N: int
    m: int
    ratio: float
    asymptote: Optional[float] = None


@dataclass(frozen=True)
class SweepTable:
    family: Family
    rows: Tuple[SweepRow, ...]
    skipped: Tuple[Tuple[int, str], ...] = field(default=())

    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.rows])

    def photon_numbers(self) -> np.ndarray:
        return np.array([r.N for r in self.rows])


_UNIT_SOURCE = GaussianSource(1.0)


def ratio_sweep(max_N: int, family: Union[Family, str]) -> SweepTable:
    """Width ratio to the two-photon width for every even ``N <= max_N``."""
    family = Family(family)
    if max_N < 2 or max_N % 2:
        raise ValueError(f"max_N must be even and >= 2, got {max_N}")
    rows, skipped = [], []
    for N in range(2, max_N + 1, 2):
        spec, why = family.outcome(N)
        if spec is None:
            skipped.append((N, why))
            continue
        if family is Family.N0 and N >= FAST_PATH_MIN_N:
            coeffs = coefficients_closed_form_N0(N)
        else:
            coeffs = coefficients(spec)
        report = _width_report(spec, coeffs, _UNIT_SOURCE)
        if report.feature_kind is FeatureKind.FLAT:
            skipped.append((N, "flat feature"))
            continue
        asym = 2 / math.sqrt(N) if family is Family.N0 else None
        rows.append(SweepRow(N, spec.m, report.ratio_to_11, asym))
    return SweepTable(family, tuple(rows), tuple(skipped))
