"""Exact algebra of bosonic creation-operator polynomials on a 50:50 beam splitter.

States are polynomials in creation operators acting on the vacuum.  Every mode
carries a spatial label (input ports ``a``/``b``, output ports ``c``/``d``) and
an internal label (``matched`` or ``orthogonal``) which the beam splitter leaves
untouched.  Amplitudes are kept exact: a Gaussian rational times ``2**(-h/2)``
times the square root of an odd square-free integer, so probabilities come out
as :class:`fractions.Fraction` without any rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Tuple, Union

__all__ = [
    "Spatial",
    "Internal",
    "ModeId",
    "Amplitude",
    "OperatorMonomial",
    "OperatorPolynomial",
    "BeamSplitterConvention",
    "build_state",
    "bs_transform",
    "fock_probabilities",
    "marginal_spatial",
]


class Spatial(str, enum.Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"


class Internal(str, enum.Enum):
    MATCHED = "matched"
    ORTHOGONAL = "orthogonal"


INPUT_PORTS = frozenset({Spatial.A, Spatial.B})
OUTPUT_PORTS = frozenset({Spatial.C, Spatial.D})


class ModeId(NamedTuple):
    spatial: Spatial
    internal: Internal = Internal.MATCHED

    @classmethod
    def of(cls, value: "ModeLike") -> "ModeId":
        """Coerce ``ModeId``, ``("a", "matched")`` or plain ``"a"`` to a ModeId."""
        if isinstance(value, ModeId):
            return value
        if isinstance(value, str):
            return cls(Spatial(value), Internal.MATCHED)
        spatial, internal = value
        return cls(Spatial(spatial), Internal(internal))

    def __str__(self) -> str:
        return f"{self.spatial.value}:{self.internal.value}"


ModeLike = Union[ModeId, Tuple[str, str], str]
# canonical occupation key: sorted ((mode, count), ...) with count > 0
OccKey = Tuple[Tuple[ModeId, int], ...]


# --------------------------------------------------------------------------
# exact amplitudes
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _squarefree_split(n: int) -> Tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` square-free."""
    if n <= 0:
        raise ValueError(f"radicand must be positive, got {n}")
    s, r = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            r *= p
        p += 1 if p == 2 else 2
    return s, r * n


def _fold_pow2(re: Fraction, im: Fraction, h: int) -> Tuple[Fraction, Fraction, int]:
    q, h = divmod(h, 2)
    scale = Fraction(1, 2**q) if q >= 0 else Fraction(2 ** (-q))
    return re * scale, im * scale, h


@dataclass(frozen=True)
class Amplitude:
    """Exact amplitude ``(re + i*im) * 2**(-half_pow2/2) * sqrt(radicand)``.

    The canonical form has ``half_pow2`` in ``{0, 1}`` and ``radicand`` odd and
    square-free; construction normalizes any other input to that form.  Two
    amplitudes can be added only if they share the same irrational part.
    """

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)
    half_pow2: int = 0
    radicand: int = 1

    def __post_init__(self) -> None:
        re, im = Fraction(self.re), Fraction(self.im)
        h, rad = int(self.half_pow2), int(self.radicand)
        if re == 0 and im == 0:
            h, rad = 0, 1
        else:
            s, rad = _squarefree_split(rad)
            re, im = re * s, im * s
            if rad % 2 == 0:
                rad //= 2
                h -= 1
            re, im, h = _fold_pow2(re, im, h)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "half_pow2", h)
        object.__setattr__(self, "radicand", rad)

    @classmethod
    def sqrt(cls, value: Union[int, Fraction]) -> "Amplitude":
        """Exact square root of a non-negative rational."""
        value = Fraction(value)
        if value < 0:
            raise ValueError(f"cannot take the square root of {value}")
        if value == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q) / q
        return cls(Fraction(1, value.denominator), radicand=value.numerator * value.denominator)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def _irrational(self) -> Tuple[int, int]:
        return self.half_pow2, self.radicand

    def __add__(self, other: "Amplitude") -> "Amplitude":
        if not isinstance(other, Amplitude):
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self._irrational() != other._irrational():
            raise ValueError(
                f"cannot add amplitudes with different irrational parts: {self!r} + {other!r}"
            )
        return Amplitude(self.re + other.re, self.im + other.im, self.half_pow2, self.radicand)

    def __neg__(self) -> "Amplitude":
        return Amplitude(-self.re, -self.im, self.half_pow2, self.radicand)

    def __sub__(self, other: "Amplitude") -> "Amplitude":
        return self + (-other)

    def __mul__(self, other: Union["Amplitude", int, Fraction]) -> "Amplitude":
        if isinstance(other, (int, Fraction)):
            other = Amplitude(Fraction(other))
        if not isinstance(other, Amplitude):
            return NotImplemented
        g = math.gcd(self.radicand, other.radicand)
        rad = (self.radicand // g) * (other.radicand // g)
        re = (self.re * other.re - self.im * other.im) * g
        im = (self.re * other.im + self.im * other.re) * g
        return Amplitude(re, im, self.half_pow2 + other.half_pow2, rad)

    __rmul__ = __mul__

    def conjugate(self) -> "Amplitude":
        return Amplitude(self.re, -self.im, self.half_pow2, self.radicand)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return (self.re**2 + self.im**2) * self.radicand / 2**self.half_pow2

    def __complex__(self) -> complex:
        scale = math.sqrt(self.radicand) * 2 ** (-self.half_pow2 / 2)
        return complex(float(self.re) * scale, float(self.im) * scale)


ONE = Amplitude(Fraction(1))
_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


# --------------------------------------------------------------------------
# operator polynomials
# --------------------------------------------------------------------------

def _occ_key(occupations: Mapping[ModeLike, int]) -> OccKey:
    merged: Dict[ModeId, int] = {}
    for mode, n in occupations.items():
        n = int(n)
        if n < 0:
            raise ValueError(f"negative occupation {n} for mode {mode}")
        if n:
            m = ModeId.of(mode)
            merged[m] = merged.get(m, 0) + n
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class OperatorMonomial:
    occupations: OccKey
    amplitude: Amplitude

    @property
    def photon_number(self) -> int:
        return sum(n for _, n in self.occupations)

    def as_dict(self) -> Dict[ModeId, int]:
        return dict(self.occupations)

    def factorial_weight(self) -> int:
        return math.prod(math.factorial(n) for _, n in self.occupations)


@dataclass(frozen=True)
class OperatorPolynomial:
    """A homogeneous polynomial in creation operators, in canonical merged form."""

    terms: Tuple[OperatorMonomial, ...]
    photon_number: int

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Mapping[ModeLike, int] | OccKey, Amplitude]]) -> "OperatorPolynomial":
        acc: Dict[OccKey, Amplitude] = {}
        for occ, amp in pairs:
            key = occ if isinstance(occ, tuple) else _occ_key(occ)
            acc[key] = acc[key] + amp if key in acc else amp
        return cls._from_dict(acc)

    @classmethod
    def _from_dict(cls, acc: Mapping[OccKey, Amplitude], photon_number: int | None = None) -> "OperatorPolynomial":
        terms = tuple(
            OperatorMonomial(key, amp) for key, amp in sorted(acc.items()) if not amp.is_zero
        )
        sizes = {t.photon_number for t in terms}
        if len(sizes) > 1:
            raise ValueError(f"inhomogeneous polynomial with photon numbers {sorted(sizes)}")
        if photon_number is None:
            photon_number = sizes.pop() if sizes else 0
        return cls(terms, photon_number)

    @classmethod
    def linear(cls, coefficients: Mapping[ModeLike, Amplitude]) -> "OperatorPolynomial":
        """Single-photon operator ``sum_mode coeff * mode^dagger``."""
        return cls.from_pairs(({m: 1}, amp) for m, amp in coefficients.items())

    def as_dict(self) -> Dict[OccKey, Amplitude]:
        return {t.occupations: t.amplitude for t in self.terms}

    def __iter__(self) -> Iterator[OperatorMonomial]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        pairs = [(t.occupations, t.amplitude) for t in self.terms + other.terms]
        return OperatorPolynomial.from_pairs(pairs)

    def __mul__(self, other: Union["OperatorPolynomial", Amplitude]) -> "OperatorPolynomial":
        if isinstance(other, Amplitude):
            return OperatorPolynomial._from_dict(
                {t.occupations: t.amplitude * other for t in self.terms}, self.photon_number
            )
        acc: Dict[OccKey, Amplitude] = {}
        for s in self.terms:
            for t in other.terms:
                merged = dict(s.occupations)
                for mode, n in t.occupations:
                    merged[mode] = merged.get(mode, 0) + n
                key = tuple(sorted(merged.items()))
                amp = s.amplitude * t.amplitude
                acc[key] = acc[key] + amp if key in acc else amp
        return OperatorPolynomial._from_dict(acc, self.photon_number + other.photon_number)

    def __pow__(self, k: int) -> "OperatorPolynomial":
        result = OperatorPolynomial((OperatorMonomial((), ONE),), 0)
        for _ in range(k):
            result = result * self
        return result

    def modes(self) -> frozenset:
        return frozenset(m for t in self.terms for m, _ in t.occupations)

    def norm_sq(self) -> Fraction:
        """Squared norm of the state the polynomial creates from the vacuum."""
        return sum((t.amplitude.abs2() * t.factorial_weight() for t in self.terms), Fraction(0))


# --------------------------------------------------------------------------
# beam splitter
# --------------------------------------------------------------------------

class BeamSplitterConvention(enum.Enum):
    """Phase convention of the balanced beam splitter.

    Each entry maps an input port to ``(u_c, u_d)``, Gaussian-integer units so
    that ``port^dagger -> (u_c c^dagger + u_d d^dagger) / sqrt(2)``.
    """

    REAL = "real"  # a -> (c + d)/sqrt2, b -> (c - d)/sqrt2
    SYMMETRIC = "symmetric"  # a -> (c + i d)/sqrt2, b -> (i c + d)/sqrt2

    @property
    def matrix(self) -> Dict[Spatial, Tuple[Tuple[int, int], Tuple[int, int]]]:
        if self is BeamSplitterConvention.REAL:
            return {Spatial.A: ((1, 0), (1, 0)), Spatial.B: ((1, 0), (-1, 0))}
        return {Spatial.A: ((1, 0), (0, 1)), Spatial.B: ((0, 1), (1, 0))}


def _gmul(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gpow(x: Tuple[int, int], k: int) -> Tuple[int, int]:
    # entries are units, so powers cycle
    if x in _I_POWERS:
        return _I_POWERS[(_I_POWERS.index(x) * k) % 4]
    out = (1, 0)
    for _ in range(k):
        out = _gmul(out, x)
    return out


def _port_expansion(n: int, u: Tuple[Tuple[int, int], Tuple[int, int]]) -> list:
    """Coefficients of ``(u_c c + u_d d)^n`` indexed by the power of ``c``."""
    return [
        (lambda g: (math.comb(n, j) * g[0], math.comb(n, j) * g[1]))(
            _gmul(_gpow(u[0], j), _gpow(u[1], n - j))
        )
        for j in range(n + 1)
    ]


@lru_cache(maxsize=1024)
def _label_expansion(p: int, q: int, convention: BeamSplitterConvention) -> Tuple[Tuple[int, int, int], ...]:
    """Expand ``a^p b^q`` for one internal label as ``(n_c, re, im)`` entries (without the 2^(-(p+q)/2))."""
    mat = convention.matrix
    left = _port_expansion(p, mat[Spatial.A])
    right = _port_expansion(q, mat[Spatial.B])
    out = [(0, 0)] * (p + q + 1)
    for j, x in enumerate(left):
        if x == (0, 0):
            continue
        for k, y in enumerate(right):
            z = _gmul(x, y)
            o = out[j + k]
            out[j + k] = (o[0] + z[0], o[1] + z[1])
    return tuple((nc, re, im) for nc, (re, im) in enumerate(out) if (re, im) != (0, 0))


def bs_transform(
    state: OperatorPolynomial,
    convention: BeamSplitterConvention | str = BeamSplitterConvention.REAL,
) -> OperatorPolynomial:
    """Send every input-port operator through the beam splitter.

    Each internal label is expanded independently: ``a^p b^q`` becomes a
    convolution of two binomial expansions, so cost stays polynomial in the
    photon number.
    """
    convention = BeamSplitterConvention(convention)
    for m in state.modes():
        if m.spatial not in INPUT_PORTS:
            raise ValueError(f"mode {m} is not an input port; state already transformed?")

    acc: Dict[OccKey, Amplitude] = {}
    for term in state.terms:
        per_label: Dict[Internal, list] = {}
        for mode, n in term.occupations:
            per_label.setdefault(mode.internal, [0, 0])[0 if mode.spatial is Spatial.A else 1] += n
        # partial products over labels: list of (occupation dict, gaussian int)
        partial = [((), (1, 0))]
        for label in sorted(per_label):
            p, q = per_label[label]
            expansion = _label_expansion(p, q, convention)
            c_mode, d_mode = ModeId(Spatial.C, label), ModeId(Spatial.D, label)
            nxt = []
            for occ, g in partial:
                for nc, re, im in expansion:
                    nd = p + q - nc
                    extra = tuple(x for x in ((c_mode, nc), (d_mode, nd)) if x[1])
                    nxt.append((occ + extra, _gmul(g, (re, im))))
            partial = nxt
        scale = Amplitude(Fraction(1), half_pow2=state.photon_number)
        base = term.amplitude * scale
        for occ, (re, im) in partial:
            key = tuple(sorted(occ))
            amp = base * Amplitude(Fraction(re), Fraction(im))
            acc[key] = acc[key] + amp if key in acc else amp
    return OperatorPolynomial._from_dict(acc, state.photon_number)


# --------------------------------------------------------------------------
# construction and readout
# --------------------------------------------------------------------------

def build_state(occupation_spec: Mapping[ModeLike, int]) -> OperatorPolynomial:
    """Normalized Fock state ``prod (mode^dagger)^n |0> / sqrt(prod n!)`` on the input ports."""
    key = _occ_key(occupation_spec)
    if not key:
        raise ValueError("state must contain at least one photon")
    for mode, _ in key:
        if mode.spatial not in INPUT_PORTS:
            raise ValueError(f"input states live on ports a/b, got {mode}")
    weight = math.prod(math.factorial(n) for _, n in key)
    return OperatorPolynomial((OperatorMonomial(key, Amplitude.sqrt(Fraction(1, weight))),),
                              sum(n for _, n in key))


def fock_probabilities(state: OperatorPolynomial) -> Dict[OccKey, Fraction]:
    """Born-rule probability of every output Fock occupation."""
    for m in state.modes():
        if m.spatial not in OUTPUT_PORTS:
            raise ValueError(f"mode {m} is not an output port; apply bs_transform first")
    return {t.occupations: t.amplitude.abs2() * t.factorial_weight() for t in state.terms}


def marginal_spatial(probs: Mapping[OccKey, Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """Sum over internal labels, keyed by ``(n_c, n_d)``."""
    out: Dict[Tuple[int, int], Fraction] = {}
    for occ, p in probs.items():
        nc = sum(n for m, n in occ if m.spatial is Spatial.C)
        nd = sum(n for m, n in occ if m.spatial is Spatial.D)
        out[(nc, nd)] = out.get((nc, nd), Fraction(0)) + p
    return out
