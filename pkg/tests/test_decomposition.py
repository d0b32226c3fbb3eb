import math
from fractions import Fraction as F

import pytest

from fockhom.decomposition import (
    IndistPolynomial,
    OutcomeSpec,
    build_dtype_input,
    coefficients,
    coefficients_closed_form_N0,
    direct_probability,
    per_type_probability,
    type_probabilities,
    type_weight,
)
from fockhom.mode_algebra import Amplitude, BeamSplitterConvention

from .permanent_oracle import dtype_port_probability


def coeffs(N, m):
    return coefficients(OutcomeSpec(N, m)).coeffs


# --------------------------------------------------------------------------
# inputs and weights
# --------------------------------------------------------------------------

def test_outcome_spec_validation():
    for N, m in [(3, 0), (0, 0), (4, 5), (4, -1)]:
        with pytest.raises(ValueError):
            OutcomeSpec(N, m)
    assert OutcomeSpec(4, 1).label == "(3,1)"


def test_dtype_input_fully_indistinguishable_pair():
    (term,) = build_dtype_input(2, 0).terms
    assert [(m.spatial.value, m.internal.value, n) for m, n in term.occupations] == [
        ("a", "matched", 1), ("b", "matched", 1)
    ]
    assert term.amplitude == Amplitude(F(1))


def test_dtype_input_fully_distinguishable():
    (term,) = build_dtype_input(4, 2).terms
    assert {(m.spatial.value, m.internal.value): n for m, n in term.occupations} == {
        ("a", "matched"): 2, ("b", "orthogonal"): 2
    }
    assert term.amplitude == Amplitude(F(1, 2))


def test_dtype_input_mixed_type_normalized():
    state = build_dtype_input(4, 1)
    (term,) = state.terms
    assert term.amplitude == Amplitude.sqrt(F(1, 2))
    assert state.norm_sq() == 1


@pytest.mark.parametrize("N,d", [(3, 0), (4, 3), (4, -1)])
def test_dtype_input_range(N, d):
    with pytest.raises(ValueError):
        build_dtype_input(N, d)


def test_type_weight_examples():
    assert type_weight(4, 1).coeffs == (0, 2, -2)
    assert type_weight(2, 0).coeffs == (0, 1)


@pytest.mark.parametrize("N", range(2, 21, 2))
def test_type_weights_sum_to_one(N):
    total = [F(0)] * (N // 2 + 1)
    for d in range(N // 2 + 1):
        for k, w in enumerate(type_weight(N, d).coeffs):
            total[k] += w
    assert total == [1] + [0] * (N // 2)


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_type_weights_nonnegative_on_unit_interval(N):
    for d in range(N // 2 + 1):
        for i in range(11):
            assert type_weight(N, d)(F(i, 10)) >= 0


# --------------------------------------------------------------------------
# per-type probabilities
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "N,d,m,expected",
    [
        (4, 0, 0, F(3, 8)),
        (4, 0, 1, F(0)),
        (4, 2, 1, F(1, 4)),
        (4, 1, 0, F(3, 16)),
        (4, 1, 1, F(1, 4)),
    ],
)
def test_per_type_examples(N, d, m, expected):
    assert per_type_probability(N, d, m) == expected


def test_four_photon_bunching_ratio():
    # fully indistinguishable (4,0) over fully distinguishable (4,0)
    assert per_type_probability(4, 0, 0) / per_type_probability(4, 2, 0) == 6


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_per_type_matches_permanent_oracle(N):
    for d in range(N // 2 + 1):
        for m in range(N + 1):
            expected = dtype_port_probability(N, d, m)
            assert float(per_type_probability(N, d, m)) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("N", [2, 4, 6])
def test_per_type_convention_independent(N):
    for d in range(N // 2 + 1):
        assert type_probabilities(N, d, BeamSplitterConvention.REAL) == type_probabilities(
            N, d, BeamSplitterConvention.SYMMETRIC
        )


# --------------------------------------------------------------------------
# coefficient polynomials
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "N,m,expected",
    [
        (2, 0, (F(1, 4), F(1, 4))),
        (2, 1, (F(1, 2), F(-1, 2))),
        (4, 0, (F(1, 16), F(1, 4), F(1, 16))),
        (4, 1, (F(1, 4), F(0), F(-1, 4))),
    ],
)
def test_table_coefficients(N, m, expected):
    assert coeffs(N, m) == expected


def test_balanced_four_photon_coefficients():
    c = coefficients(OutcomeSpec(4, 2))
    assert c.coeffs == (F(3, 8), F(-1, 2), F(3, 8))
    assert c(F(1)) == F(1, 4)
    assert c(F(0)) == F(3, 8)


@pytest.mark.parametrize(
    "N,expected",
    [
        (2, (F(1, 4), F(1, 4))),
        (4, (F(1, 16), F(4, 16), F(1, 16))),
        (6, (F(1, 64), F(9, 64), F(9, 64), F(1, 64))),
    ],
)
def test_closed_form_examples(N, expected):
    assert coefficients_closed_form_N0(N).coeffs == expected


@pytest.mark.parametrize("N", range(2, 17, 2))
def test_closed_form_agrees_with_decomposition(N):
    assert coeffs(N, 0) == coefficients_closed_form_N0(N).coeffs


@pytest.mark.parametrize("N", range(2, 13, 2))
def test_normalization_per_power(N):
    half = N // 2
    for k in range(half + 1):
        assert sum(coeffs(N, m)[k] for m in range(N + 1)) == (1 if k == 0 else 0)


@pytest.mark.parametrize("N", range(2, 13, 2))
def test_mirror_symmetry(N):
    for m in range(N + 1):
        assert coeffs(N, m) == coeffs(N, N - m)


@pytest.mark.parametrize("N", range(2, 13, 2))
def test_classical_limit(N):
    for m in range(N + 1):
        assert coeffs(N, m)[0] == F(math.comb(N, m), 2**N)


def test_two_photon_has_no_quadratic_term():
    for m in range(3):
        assert len(coeffs(2, m)) == 2


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_values_are_probabilities(N):
    for m in range(N + 1):
        poly = coefficients(OutcomeSpec(N, m))
        for i in range(21):
            assert 0 <= poly(F(i, 20)) <= 1


def test_polynomial_evaluates_floats_and_arrays():
    import numpy as np

    poly = IndistPolynomial((F(1, 4), F(0), F(-1, 4)))
    assert poly(0.5) == pytest.approx(0.1875)
    assert np.allclose(poly(np.array([0.0, 1.0])), [0.25, 0.0])
    assert poly.nonzero_powers() == (0, 2)


# --------------------------------------------------------------------------
# direct path
# --------------------------------------------------------------------------

def test_direct_examples():
    assert direct_probability(OutcomeSpec(4, 1), 1) == 0
    assert direct_probability(OutcomeSpec(4, 0), F(9, 16)) == F(1, 16) + F(1, 4) * F(9, 16) + F(1, 16) * F(81, 256)
    assert direct_probability(OutcomeSpec(2, 1), 0) == F(1, 2)


RATIONAL_SQUARES = [F(0), F(1, 16), F(1, 4), F(9, 25), F(4, 9), F(9, 16), F(16, 25), F(1)]


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_direct_matches_decomposition(N):
    for m in range(N + 1):
        poly = coefficients(OutcomeSpec(N, m))
        for x in RATIONAL_SQUARES:
            assert direct_probability(OutcomeSpec(N, m), x) == poly(x)


def test_direct_accepts_non_square_rationals():
    spec = OutcomeSpec(6, 2)
    assert direct_probability(spec, F(7, 10)) == coefficients(spec)(F(7, 10))


def test_direct_rejects_out_of_range():
    with pytest.raises(ValueError):
        direct_probability(OutcomeSpec(2, 0), F(5, 4))
