"""Distinguishability-type decomposition of a delayed twin Fock state.

A delayed photon in port ``b`` is split into a part matched to the port-``a``
photons (amplitude ``sqrt(I)``) and an orthogonal remainder.  Expanding
``N/2`` such photons gives ``N/2 + 1`` mutually orthogonal *types*, indexed by
the number ``d`` of orthogonal photons.  The detection probability of an
``(N-m, m)`` event is then a polynomial in the indistinguishability ``I``::

    P(I) = sum_d p_d * W_d(I),   W_d(I) = C(N/2, d) I^(N/2-d) (1-I)^d

Everything here is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple, Union

import numpy as np

from .mode_algebra import (
    Amplitude,
    BeamSplitterConvention,
    Internal,
    ModeId,
    OperatorPolynomial,
    Spatial,
    build_state,
    bs_transform,
    fock_probabilities,
    marginal_spatial,
)

__all__ = [
    "OutcomeSpec",
    "IndistPolynomial",
    "TypeWeightPolynomial",
    "build_dtype_input",
    "type_weight",
    "per_type_probability",
    "type_probabilities",
    "coefficients",
    "coefficients_closed_form_N0",
    "direct_probability",
]

A_MATCHED = ModeId(Spatial.A, Internal.MATCHED)
B_MATCHED = ModeId(Spatial.B, Internal.MATCHED)
B_ORTH = ModeId(Spatial.B, Internal.ORTHOGONAL)


def _check_photons(N: int) -> None:
    if not isinstance(N, (int, np.integer)) or N < 2 or N % 2:
        raise ValueError(f"total photon number must be even and >= 2, got {N!r}")


def _check_type(N: int, d: int) -> None:
    _check_photons(N)
    if not 0 <= d <= N // 2:
        raise ValueError(f"type index d={d} outside 0..{N // 2}")


@dataclass(frozen=True)
class OutcomeSpec:
    """``(N - m, m)`` detection: ``N - m`` photons at port c, ``m`` at port d."""

    N: int
    m: int

    def __post_init__(self) -> None:
        _check_photons(self.N)
        if not 0 <= self.m <= self.N:
            raise ValueError(f"outcome m={self.m} outside 0..{self.N}")

    @property
    def label(self) -> str:
        return f"({self.N - self.m},{self.m})"

    def mirrored(self) -> "OutcomeSpec":
        return OutcomeSpec(self.N, self.N - self.m)


@dataclass(frozen=True)
class IndistPolynomial:
    """Coefficients ``c_k`` of ``P(I) = sum_k c_k I**k``; ``coeffs[k]`` multiplies ``I**k``."""

    coeffs: Tuple[Fraction, ...]

    def __call__(self, x):
        # Horner; works for Fraction, float and numpy arrays alike
        if isinstance(x, (Fraction, int)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc if acc.ndim else float(acc)

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else 0

    def nonzero_powers(self) -> Tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.coeffs) if c != 0)

    def as_strings(self) -> Tuple[str, ...]:
        return tuple(str(c) for c in self.coeffs)


@dataclass(frozen=True)
class TypeWeightPolynomial:
    N: int
    d: int
    coeffs: Tuple[Fraction, ...]

    def __call__(self, x):
        return IndistPolynomial(self.coeffs)(x)


def build_dtype_input(N: int, d: int) -> OperatorPolynomial:
    """Input state with ``d`` of the ``N/2`` port-b photons orthogonal to port a."""
    _check_type(N, d)
    half = N // 2
    return build_state({A_MATCHED: half, B_MATCHED: half - d, B_ORTH: d})


@lru_cache(maxsize=None)
def type_weight(N: int, d: int) -> TypeWeightPolynomial:
    _check_type(N, d)
    half = N // 2
    coeffs = [Fraction(0)] * (half + 1)
    # C(h,d) I^(h-d) (1-I)^d = C(h,d) sum_j C(d,j) (-1)^j I^(h-d+j)
    for j in range(d + 1):
        coeffs[half - d + j] += math.comb(half, d) * math.comb(d, j) * (-1) ** j
    return TypeWeightPolynomial(N, d, tuple(coeffs))


@lru_cache(maxsize=None)
def type_probabilities(
    N: int, d: int, convention: BeamSplitterConvention = BeamSplitterConvention.REAL
) -> Dict[int, Fraction]:
    """All ``p_d`` values of one type at once, keyed by ``m``."""
    _check_type(N, d)
    marg = marginal_spatial(fock_probabilities(bs_transform(build_dtype_input(N, d), convention)))
    return {m: marg.get((N - m, m), Fraction(0)) for m in range(N + 1)}


def per_type_probability(N: int, d: int, m: int) -> Fraction:
    """Exact ``(N-m, m)`` probability of the ``d``-type input after the beam splitter."""
    if not 0 <= m <= N:
        raise ValueError(f"outcome m={m} outside 0..{N}")
    return type_probabilities(N, d)[m]


@lru_cache(maxsize=None)
def _coefficients(N: int, m: int) -> IndistPolynomial:
    half = N // 2
    c = [Fraction(0)] * (half + 1)
    for d in range(half + 1):
        p = per_type_probability(N, d, m)
        if p:
            for k, w in enumerate(type_weight(N, d).coeffs):
                c[k] += p * w
    return IndistPolynomial(tuple(c))


def coefficients(spec: OutcomeSpec) -> IndistPolynomial:
    return _coefficients(spec.N, spec.m)


def coefficients_closed_form_N0(N: int) -> IndistPolynomial:
    """All photons at one port: ``c_k = 2**-N * C(N/2, k)**2``."""
    _check_photons(N)
    half = N // 2
    return IndistPolynomial(tuple(Fraction(math.comb(half, k) ** 2, 2**N) for k in range(half + 1)))


def direct_probability(spec: OutcomeSpec, I_value: Union[Fraction, int, str]) -> Fraction:
    """``P(I)`` from the undecomposed state, without going through the types.

    Every port-b photon is created as ``sqrt(I) b_matched + sqrt(1-I) b_orth``
    and the full product is pushed through the beam splitter.  Exact for any
    rational ``I`` in [0, 1].
    """
    I_value = Fraction(I_value)
    if not 0 <= I_value <= 1:
        raise ValueError(f"indistinguishability must lie in [0, 1], got {I_value}")
    half = spec.N // 2
    photon_b = OperatorPolynomial.linear(
        {B_MATCHED: Amplitude.sqrt(I_value), B_ORTH: Amplitude.sqrt(1 - I_value)}
    )
    photons_a = OperatorPolynomial.linear({A_MATCHED: Amplitude(Fraction(1))}) ** half
    norm = Amplitude.sqrt(Fraction(1, math.factorial(half) ** 2))
    state = (photons_a * photon_b**half) * norm
    marg = marginal_spatial(fock_probabilities(bs_transform(state)))
    return marg.get((spec.N - spec.m, spec.m), Fraction(0))
