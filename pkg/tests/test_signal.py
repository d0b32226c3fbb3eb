import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import brentq

from fockhom.decomposition import OutcomeSpec, coefficients
from fockhom.signal import (
    FWHM_FACTOR,
    FeatureKind,
    Family,
    GaussianSource,
    enhancement,
    feature_fwhm,
    indistinguishability,
    power_fwhm,
    probability_curve,
    ratio_sweep,
)

UNIT = GaussianSource(1.0)
LN_HALF = math.log(0.5)


def ratio_from_half_max_root(x):
    """Width ratio for a feature whose outermost half-max sits at I = x."""
    return math.sqrt(math.log(x) / LN_HALF)


# --------------------------------------------------------------------------
# source and indistinguishability
# --------------------------------------------------------------------------

def test_source_conversions():
    src = GaussianSource.from_delta_tau(379.0)
    assert src.delta_tau == pytest.approx(379.0, rel=1e-15)
    assert src.delta_omega * src.delta_tau == pytest.approx(math.sqrt(8 * math.log(2)))


@pytest.mark.parametrize("kwargs", [{"delta_omega": 0.0}, {"delta_omega": 1.0, "visibility": 0.0},
                                    {"delta_omega": 1.0, "visibility": 1.1}])
def test_source_validation(kwargs):
    with pytest.raises(ValueError):
        GaussianSource(**kwargs)


def test_indistinguishability_examples():
    assert indistinguishability(0.0, UNIT) == 1.0
    assert indistinguishability(math.sqrt(2 * math.log(2)), UNIT) == pytest.approx(0.5, abs=1e-15)
    assert indistinguishability(0.0, GaussianSource(1.0, 0.9)) == 0.9


def test_indistinguishability_monotone_in_delay():
    tau = np.linspace(0, 5, 200)
    vals = indistinguishability(tau, GaussianSource(1.3))
    assert np.all(np.diff(vals) < 0)
    assert np.allclose(vals, indistinguishability(-tau, GaussianSource(1.3)))


def test_power_fwhm():
    assert power_fwhm(1, UNIT) == pytest.approx(2.35482, abs=1e-5)
    assert power_fwhm(2, UNIT) == pytest.approx(UNIT.delta_tau / math.sqrt(2), rel=1e-15)
    assert power_fwhm(4, UNIT) == pytest.approx(UNIT.delta_tau / 2, rel=1e-15)
    with pytest.raises(ValueError):
        power_fwhm(0, UNIT)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 10])
def test_power_fwhm_is_half_max_width(k):
    half = power_fwhm(k, GaussianSource(0.7)) / 2
    assert indistinguishability(half, GaussianSource(0.7)) ** k == pytest.approx(0.5, rel=1e-12)


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------

def test_curve_examples():
    spec31 = OutcomeSpec(4, 1)
    assert probability_curve(spec31, UNIT, [0.0]).probability[0] == pytest.approx(0.0, abs=1e-15)
    far = probability_curve(OutcomeSpec(4, 0), UNIT, [1e3]).probability[0]
    assert far == pytest.approx(1 / 16, abs=1e-15)
    tau_half = math.sqrt(2 * math.log(2))  # I = 1/2
    assert probability_curve(OutcomeSpec(2, 1), UNIT, [tau_half]).probability[0] == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("N,m", [(2, 0), (4, 1), (6, 2), (8, 4)])
def test_curve_symmetric_and_bounded(N, m):
    grid = np.linspace(-6, 6, 241)
    curve = probability_curve(OutcomeSpec(N, m), GaussianSource(1.0, 0.8), grid)
    assert np.allclose(curve.probability, curve.probability[::-1], atol=1e-15)
    assert np.all((curve.probability >= 0) & (curve.probability <= 1))
    assert curve.probability[0] == pytest.approx(float(coefficients(OutcomeSpec(N, m)).coeffs[0]), abs=1e-6)


def test_curve_rejects_non_finite_grid():
    with pytest.raises(ValueError):
        probability_curve(OutcomeSpec(2, 0), UNIT, [0.0, np.inf])


# --------------------------------------------------------------------------
# widths
# --------------------------------------------------------------------------

def test_two_photon_widths_equal_coherence_time():
    for m in (0, 1):
        report = feature_fwhm(OutcomeSpec(2, m), UNIT)
        assert report.fwhm == pytest.approx(UNIT.delta_tau, rel=1e-12)
    assert feature_fwhm(OutcomeSpec(2, 0), UNIT).feature_kind is FeatureKind.PEAK
    assert feature_fwhm(OutcomeSpec(2, 1), UNIT).feature_kind is FeatureKind.DIP


def test_three_one_width():
    report = feature_fwhm(OutcomeSpec(4, 1), UNIT)
    assert report.ratio_to_11 == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert report.fwhm == pytest.approx(power_fwhm(2, UNIT), abs=1e-9)


def test_four_zero_width_from_quadratic():
    # x/4 + x^2/16 = 5/32  <=>  x^2 + 4x - 5/2 = 0
    x = -2 + math.sqrt(4 + 2.5)
    expected = ratio_from_half_max_root(x)
    assert expected == pytest.approx(0.92941, abs=1e-3)
    assert feature_fwhm(OutcomeSpec(4, 0), UNIT).ratio_to_11 == pytest.approx(expected, rel=1e-10)


def test_balanced_four_photon_width_uses_outermost_crossing():
    # |x/2 - 3x^2/8| = 1/16  <=>  6x^2 - 8x + 1 = 0, smaller root
    x = (8 - math.sqrt(40)) / 12
    expected = ratio_from_half_max_root(x)
    report = feature_fwhm(OutcomeSpec(4, 2), UNIT)
    assert report.ratio_to_11 == pytest.approx(expected, rel=1e-10)
    assert report.ratio_to_11 == pytest.approx(1.6854, abs=1e-4)
    assert report.feature_kind is FeatureKind.DIP


@pytest.mark.parametrize("N,m", [(6, 0), (6, 1), (6, 3), (8, 2), (10, 5)])
def test_width_matches_root_finding_in_indistinguishability(N, m):
    c = [float(x) for x in coefficients(OutcomeSpec(N, m)).coeffs]
    dev = lambda x: abs(sum(ck * x**k for k, ck in enumerate(c) if k))
    half = dev(1.0) / 2
    # outermost crossing = smallest x with dev = half; dev is ~linear near 0
    xs = np.linspace(1e-9, 1, 200001)
    i = np.nonzero(np.array([dev(x) for x in xs[:: 100]]) >= half)[0][0] * 100
    lo = max(i - 100, 0)
    x = brentq(lambda x: dev(x) - half, xs[lo], xs[i])
    assert feature_fwhm(OutcomeSpec(N, m), UNIT).ratio_to_11 == pytest.approx(ratio_from_half_max_root(x), rel=1e-8)


def test_width_hierarchy():
    w = {m: feature_fwhm(OutcomeSpec(4, m), UNIT).fwhm for m in (0, 1)}
    w11 = feature_fwhm(OutcomeSpec(2, 1), UNIT).fwhm
    w20 = feature_fwhm(OutcomeSpec(2, 0), UNIT).fwhm
    assert w[1] < w[0] < w11
    assert abs(w11 - w20) <= 1e-9 * w11
    assert abs(w11 - UNIT.delta_tau) <= 1e-9 * w11


@pytest.mark.parametrize("N,m", [(2, 1), (4, 0), (4, 1), (6, 2), (8, 0)])
def test_scale_covariance(N, m):
    spec = OutcomeSpec(N, m)
    a = feature_fwhm(spec, GaussianSource(1.0))
    b = feature_fwhm(spec, GaussianSource(3.7))
    assert b.fwhm == pytest.approx(a.fwhm / 3.7, rel=1e-10)
    assert b.ratio_to_11 == pytest.approx(a.ratio_to_11, rel=1e-10)


def test_single_power_outcomes_match_power_fwhm():
    for N in range(2, 13, 2):
        for m in range(N + 1):
            spec = OutcomeSpec(N, m)
            powers = [k for k in coefficients(spec).nonzero_powers() if k > 0]
            if len(powers) == 1:
                assert feature_fwhm(spec, UNIT).fwhm == pytest.approx(power_fwhm(powers[0], UNIT), abs=1e-9)


def test_visibility_keeps_single_power_width():
    report = feature_fwhm(OutcomeSpec(2, 1), GaussianSource(1.0, 0.6))
    assert report.fwhm == pytest.approx(UNIT.delta_tau, rel=1e-12)


# --------------------------------------------------------------------------
# enhancement
# --------------------------------------------------------------------------

def test_enhancement_examples():
    assert enhancement(OutcomeSpec(2, 0)) == 2
    assert enhancement(OutcomeSpec(4, 0)) == 6
    assert enhancement(OutcomeSpec(4, 2)) == F(2, 3)
    assert isinstance(enhancement(OutcomeSpec(4, 0)), F)


def test_enhancement_drops_with_visibility():
    assert enhancement(OutcomeSpec(4, 0), 0.9) == pytest.approx(1 + 4 * 0.9 + 0.81)
    assert enhancement(OutcomeSpec(4, 0), 0.9) < 6


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

def test_sweep_n0_examples():
    table = ratio_sweep(16, Family.N0)
    by_n = {r.N: r for r in table.rows}
    assert by_n[2].ratio == pytest.approx(1.0, abs=1e-12)
    assert by_n[4].ratio == pytest.approx(ratio_from_half_max_root(-2 + math.sqrt(6.5)), rel=1e-10)
    assert by_n[16].asymptote == 0.5
    assert not table.skipped


def test_sweep_half_at_four():
    by_n = {r.N: r for r in ratio_sweep(4, "half").rows}
    assert by_n[4].ratio == pytest.approx(1.6854, abs=1e-3)
    assert by_n[4].asymptote is None


def test_sweep_family_parity_rules():
    p2 = ratio_sweep(10, Family.HALFP2)
    assert [r.N for r in p2.rows] == [6, 10]
    assert [N for N, _ in p2.skipped] == [2, 4, 8]
    p1 = ratio_sweep(10, Family.HALFP1)
    assert [r.N for r in p1.rows] == [4, 8]
    assert all(r.m == r.N // 2 - 1 for r in p1.rows)


def test_sweep_rejects_odd_max():
    with pytest.raises(ValueError):
        ratio_sweep(7, Family.N0)


def test_sweep_fast_path_agrees_with_exact_path():
    from fockhom import signal

    exact = signal._width_report(OutcomeSpec(22, 0), coefficients(OutcomeSpec(22, 0)), UNIT)
    fast = {r.N: r.ratio for r in ratio_sweep(22, Family.N0).rows}[22]
    assert fast == pytest.approx(exact.ratio_to_11, rel=1e-12)


def test_n0_ratio_strictly_decreasing():
    ratios = ratio_sweep(40, Family.N0).ratios()
    assert np.all(np.diff(ratios) < 0)


def test_n0_scaled_ratio_tail_approaches_one_from_above():
    # small N sits below the asymptote (N=2 is 1/sqrt2 by definition);
    # from N=10 on the scaled ratio is above 1 and decreasing
    table = ratio_sweep(40, Family.N0)
    scaled = table.ratios() * np.sqrt(table.photon_numbers()) / 2
    tail = scaled[table.photon_numbers() >= 10]
    assert np.all(tail > 1)
    assert np.all(np.diff(tail) < 0)
    assert tail[-1] < 1.005
