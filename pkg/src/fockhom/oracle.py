"""Floating-point cross-check by dense evolution in a truncated Fock space.

Four modes are tracked: (port 1, matched), (port 1, orthogonal),
(port 2, matched), (port 2, orthogonal).  The beam splitter is the matrix
exponential of the anti-Hermitian mixing generator
``theta * (a1^dag a2 - a2^dag a1)`` on each internal label.  Nothing in this
module touches the exact operator algebra; it is meant to catch bugs there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

__all__ = [
    "FockBasis",
    "DenseState",
    "mixing_generator",
    "expm",
    "bs_unitary_apply",
    "dtype_state",
    "delayed_state",
    "oracle_probability",
]

N_MODES = 4
# (port-1 mode, port-2 mode) pairs that the beam splitter mixes
LABEL_PAIRS = ((0, 2), (1, 3))


@dataclass(frozen=True)
class FockBasis:
    """All occupations of the four modes with exactly ``N`` photons."""

    N: int
    states: Tuple[Tuple[int, ...], ...]
    index: Dict[Tuple[int, ...], int]

    @classmethod
    def build(cls, N: int) -> "FockBasis":
        return _basis(N)

    @property
    def dim(self) -> int:
        return len(self.states)


@lru_cache(maxsize=None)
def _basis(N: int) -> FockBasis:
    if N < 0:
        raise ValueError(f"photon number must be non-negative, got {N}")
    states = tuple(
        occ for occ in itertools.product(range(N + 1), repeat=N_MODES) if sum(occ) == N
    )
    return FockBasis(N, states, {s: i for i, s in enumerate(states)})


@dataclass(frozen=True)
class DenseState:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector of shape {self.amplitudes.shape} does not match basis dimension {self.basis.dim}"
            )

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def port_distribution(self) -> Dict[Tuple[int, int], float]:
        """Probability of ``(n_port1, n_port2)``, summed over internal labels."""
        probs = np.abs(self.amplitudes) ** 2
        out: Dict[Tuple[int, int], float] = {}
        for occ, p in zip(self.basis.states, probs):
            key = (occ[0] + occ[1], occ[2] + occ[3])
            out[key] = out.get(key, 0.0) + float(p)
        return out


@lru_cache(maxsize=None)
def _hop(N: int, i: int, j: int) -> np.ndarray:
    """Matrix of ``a_i^dag a_j`` restricted to the N-photon subspace."""
    basis = _basis(N)
    op = np.zeros((basis.dim, basis.dim))
    for col, occ in enumerate(basis.states):
        if occ[j] == 0:
            continue
        new = list(occ)
        amp = math.sqrt(new[j])
        new[j] -= 1
        amp *= math.sqrt(new[i] + 1)
        new[i] += 1
        op[basis.index[tuple(new)], col] = amp
    op.setflags(write=False)
    return op


def mixing_generator(N: int, angle: float) -> np.ndarray:
    gen = np.zeros((_basis(N).dim,) * 2)
    for i, j in LABEL_PAIRS:
        gen += angle * (_hop(N, i, j) - _hop(N, j, i))
    return gen


def expm(mat: np.ndarray, order: int = 18) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    norm = np.linalg.norm(mat, 1)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    scaled = mat / 2.0**squarings
    result = np.eye(mat.shape[0], dtype=np.result_type(mat, float))
    term = result.copy()
    for k in range(1, order + 1):
        term = term @ scaled / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def bs_unitary_apply(state: DenseState, angle: float = math.pi / 4) -> DenseState:
    """Apply the beam splitter ``exp(angle * G)``; ``angle = pi/4`` is balanced."""
    unitary = expm(mixing_generator(state.basis.N, angle))
    if unitary.shape[0] != state.amplitudes.shape[0]:
        raise ValueError("state and unitary dimensions differ")
    return DenseState(state.basis, unitary @ state.amplitudes)


def _basis_state(basis: FockBasis, amplitudes: Dict[Tuple[int, ...], float]) -> DenseState:
    vec = np.zeros(basis.dim, dtype=complex)
    for occ, amp in amplitudes.items():
        vec[basis.index[occ]] += amp
    return DenseState(basis, vec)


def dtype_state(N: int, d: int) -> DenseState:
    half = N // 2
    if N % 2 or not 0 <= d <= half:
        raise ValueError(f"invalid type (N={N}, d={d})")
    return _basis_state(_basis(N), {(half, 0, half - d, d): 1.0})


def delayed_state(N: int, I: float) -> DenseState:
    """``N/2`` matched photons in port 1; each port-2 photon is ``sqrt(I) matched + sqrt(1-I) orth``."""
    if N % 2:
        raise ValueError(f"photon number must be even, got {N}")
    if not 0.0 <= I <= 1.0:
        raise ValueError(f"indistinguishability must lie in [0, 1], got {I}")
    half = N // 2
    # (r b_m + s b_o)^n / sqrt(n!) |0> = sum_j sqrt(C(n,j)) r^j s^(n-j) |j, n-j>
    r, s = math.sqrt(I), math.sqrt(1.0 - I)
    amps = {
        (half, 0, j, half - j): math.sqrt(math.comb(half, j)) * r**j * s ** (half - j)
        for j in range(half + 1)
    }
    return _basis_state(_basis(N), amps)


def oracle_probability(N: int, m: int, *, d: int | None = None, I: float | None = None) -> float:
    """Numeric ``(N-m, m)`` probability for a type index ``d`` or an indistinguishability ``I``."""
    if (d is None) == (I is None):
        raise ValueError("give exactly one of d or I")
    if not 0 <= m <= N:
        raise ValueError(f"outcome m={m} outside 0..{N}")
    state = dtype_state(N, d) if d is not None else delayed_state(N, float(I))
    out = bs_unitary_apply(state)
    return out.port_distribution().get((N - m, m), 0.0)
