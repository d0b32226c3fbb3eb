"""Weighted least-squares fits of coincidence scans to the interference model.

The model for an ``(N-m, m)`` scan is::

    counts(tau) = A * sum_k c_k * (v * exp(-4 ln2 (tau - tau0)**2 / width**2))**k + B

with ``width`` the single-photon coherence time (FWHM of the
indistinguishability).  Delays may be in any unit; ``center`` and ``width``
come out in the same unit.

Residuals are weighted by ``1/max(counts, 1)`` (Poisson variance estimate) and
minimized with a damped Gauss-Newton (Levenberg-Marquardt) iteration using
central finite-difference derivatives.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.ndimage import uniform_filter1d

from .decomposition import OutcomeSpec, coefficients
from .signal import FeatureKind, GaussianSource, WidthReport, feature_fwhm

__all__ = [
    "PARAM_NAMES",
    "FitError",
    "FlatDataError",
    "FeatureNotFoundError",
    "SingularFitError",
    "ScanData",
    "FitModelParams",
    "FitResult",
    "model_counts",
    "initial_guess",
    "fit",
    "synth_scan",
]

_logger = logging.getLogger(__name__)

PARAM_NAMES = ("amplitude", "background", "center", "width", "visibility")
DEFAULT_FIXED = {"background": 0.0, "visibility": 1.0}
_FOUR_LN2 = 4 * math.log(2)


class FitError(RuntimeError):
    """A scan that cannot be fitted."""


class FlatDataError(FitError):
    pass


class FeatureNotFoundError(FitError):
    pass


class SingularFitError(FitError):
    pass


@dataclass(frozen=True)
class ScanData:
    delays: np.ndarray
    counts: np.ndarray
    spec: Optional[OutcomeSpec] = None
    label: str = ""

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if delays.ndim != 1 or delays.shape != counts.shape:
            raise ValueError("delays and counts must be 1-d arrays of equal length")
        if len(delays) < 8:
            raise ValueError(f"a scan needs at least 8 records, got {len(delays)}")
        if not np.all(np.diff(delays) > 0):
            raise ValueError("delays must be strictly increasing")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValueError("counts must be finite and non-negative")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return len(self.delays)


@dataclass(frozen=True)
class FitModelParams:
    amplitude: float
    width: float
    center: float = 0.0
    background: float = 0.0
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude}")
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if not 0 <= self.visibility <= 1:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")
        if self.background < 0:
            raise ValueError(f"background must be non-negative, got {self.background}")

    def as_array(self, names: Sequence[str] = PARAM_NAMES) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)

    def with_values(self, names: Sequence[str], values: Iterable[float]) -> "FitModelParams":
        return replace(self, **{n: float(x) for n, x in zip(names, values)})

    def as_dict(self) -> Dict[str, float]:
        return {n: float(getattr(self, n)) for n in PARAM_NAMES}


def _coeff_array(spec: OutcomeSpec) -> np.ndarray:
    return np.array([float(c) for c in coefficients(spec).coeffs])


def _model(c: np.ndarray, tau: np.ndarray, amplitude, background, center, width, visibility):
    x = visibility * np.exp(-_FOUR_LN2 * ((tau - center) / width) ** 2)
    acc = np.zeros_like(x)
    for ck in c[::-1]:
        acc = acc * x + ck
    return amplitude * acc + background


def model_counts(params: FitModelParams, spec: OutcomeSpec, tau):
    tau = np.asarray(tau, dtype=float)
    out = _model(_coeff_array(spec), tau, params.amplitude, params.background,
                 params.center, params.width, params.visibility)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# starting point
# --------------------------------------------------------------------------

def _half_crossing(x: np.ndarray, dev: np.ndarray, start: int, step: int, half: float) -> Optional[float]:
    i = start
    while 0 <= i + step < len(dev):
        j = i + step
        if dev[j] < half:
            # linear interpolation between i (above) and j (below)
            t = (dev[i] - half) / (dev[i] - dev[j])
            return float(x[i] + t * (x[j] - x[i]))
        i = j
    return None


def initial_guess(data: ScanData, spec: OutcomeSpec, background: float = 0.0) -> FitModelParams:
    """Starting parameters from the scan shape alone.

    Raises :class:`FlatDataError` for featureless scans and
    :class:`FeatureNotFoundError` when the feature is not enclosed by the scan.
    """
    counts, delays = data.counts, data.delays
    n = len(data)
    edge = max(1, int(round(0.1 * n)))
    baseline = float(np.mean(np.concatenate([counts[:edge], counts[-edge:]])))
    smooth = uniform_filter1d(counts, size=5, mode="nearest")

    coeffs = _coeff_array(spec)
    zero_delay = coeffs.sum()
    if zero_delay == coeffs[0]:
        raise FlatDataError(f"outcome {spec.label} has no interference feature to fit")
    if np.ptp(counts) == 0:
        raise FlatDataError("scan counts are constant")
    sign = 1.0 if zero_delay > coeffs[0] else -1.0

    dev = sign * (smooth - baseline)
    peak = int(np.argmax(dev))
    depth = float(dev[peak])
    if depth <= 0:
        raise FlatDataError("scan shows no feature of the expected sign")
    if peak < edge or peak >= n - edge:
        raise FeatureNotFoundError(f"feature extremum at delay {delays[peak]:g} lies in the scan margin")
    left = _half_crossing(delays, dev, peak, -1, depth / 2)
    right = _half_crossing(delays, dev, peak, +1, depth / 2)
    if left is None or right is None:
        raise FeatureNotFoundError("feature half-maximum not crossed on both sides of the extremum")

    ratio = feature_fwhm(spec, GaussianSource(1.0)).ratio_to_11
    width = (right - left) / ratio
    amplitude = max(baseline - background, 0.0) / coeffs[0]
    if amplitude <= 0:
        raise FlatDataError("baseline does not exceed the background")
    return FitModelParams(amplitude=float(amplitude), width=width, center=float(delays[peak]),
                          background=background, visibility=1.0)


# --------------------------------------------------------------------------
# Levenberg-Marquardt
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    params: FitModelParams
    free: Tuple[str, ...]
    covariance: np.ndarray
    chi_square: float
    dof: int
    width: WidthReport
    fwhm_err: float
    enhancement: Optional[float]
    converged: bool
    iterations: int
    message: str = ""
    initial: Optional[FitModelParams] = field(default=None, compare=False)

    def stderr(self, name: str) -> float:
        if name not in self.free:
            return 0.0
        i = self.free.index(name)
        return float(math.sqrt(max(self.covariance[i, i], 0.0)))

    @property
    def reduced_chi_square(self) -> float:
        return self.chi_square / self.dof


class _Problem:
    """Weighted residuals over the free parameters."""

    def __init__(self, data: ScanData, spec: OutcomeSpec, base: FitModelParams, free: Sequence[str]):
        self.tau = data.delays
        self.y = data.counts
        self.sw = 1.0 / np.sqrt(np.maximum(data.counts, 1.0))
        self.c = _coeff_array(spec)
        self.base = base
        self.free = tuple(free)

    def params(self, p: np.ndarray) -> Dict[str, float]:
        values = self.base.as_dict()
        values.update(zip(self.free, p))
        return values

    def residuals(self, p: np.ndarray) -> np.ndarray:
        return self.sw * (self.y - _model(self.c, self.tau, **self.params(p)))

    def scales(self, p: np.ndarray) -> np.ndarray:
        vals = self.params(p)
        typical = {
            "amplitude": abs(vals["amplitude"]) or 1.0,
            "background": max(abs(vals["background"]), 1e-3 * abs(vals["amplitude"]), 1.0),
            "center": abs(vals["width"]),
            "width": abs(vals["width"]),
            "visibility": 1.0,
        }
        return np.array([typical[n] for n in self.free])

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        """Jacobian of the weighted residuals by central differences."""
        h = 1e-6 * self.scales(p)
        jac = np.empty((len(self.y), len(p)))
        for j in range(len(p)):
            step = np.zeros_like(p)
            step[j] = h[j]
            jac[:, j] = (self.residuals(p + step) - self.residuals(p - step)) / (2 * h[j])
        return jac

    def project(self, p: np.ndarray, previous: np.ndarray) -> np.ndarray:
        p = p.copy()
        for j, name in enumerate(self.free):
            if name == "visibility":
                p[j] = min(max(p[j], 1e-9), 1.0)
            elif name == "background":
                p[j] = max(p[j], 0.0)
            elif name in ("amplitude", "width"):
                # never cross zero; shrink towards it instead
                p[j] = max(p[j], 0.1 * previous[j])
        return p


def _check_normal_matrix(normal: np.ndarray, free: Sequence[str]) -> None:
    diag = np.diag(normal)
    for j, name in enumerate(free):
        if not diag[j] > 0:
            raise SingularFitError(f"model does not depend on '{name}'; fix it or change the data")
    d = 1.0 / np.sqrt(diag)
    corr = normal * d[:, None] * d[None, :]
    evals, evecs = np.linalg.eigh(corr)
    if evals[0] < 1e-12:
        vec = evecs[:, 0]
        names = [free[j] for j in np.argsort(-np.abs(vec)) if abs(vec[j]) > 0.1]
        raise SingularFitError(
            "degenerate parameter direction involving " + ", ".join(f"'{n}'" for n in names)
        )


def _resolve_fixed(fixed) -> Dict[str, float]:
    if fixed is None:
        return dict(DEFAULT_FIXED)
    if isinstance(fixed, Mapping):
        out = {k: (None if v is None else float(v)) for k, v in fixed.items()}
    else:
        out = {k: None for k in fixed}
    for k in out:
        if k not in PARAM_NAMES:
            raise ValueError(f"unknown parameter '{k}'; expected one of {PARAM_NAMES}")
    return out


def fit(
    data: ScanData,
    spec: Optional[OutcomeSpec] = None,
    init: Optional[FitModelParams] = None,
    fixed: Union[Mapping[str, Optional[float]], Iterable[str], None] = None,
    *,
    max_iter: int = 200,
    xtol: float = 1e-8,
) -> FitResult:
    """Fit a scan; ``fixed`` maps parameter names to held values.

    By default background is held at 0 and visibility at 1.  A name mapped to
    ``None`` (or given in a plain list) is held at its starting value.
    Non-convergence is reported through ``FitResult.converged``; a singular
    normal matrix raises :class:`SingularFitError`.
    """
    spec = spec or data.spec
    if spec is None:
        raise ValueError("no outcome given and the scan carries none")
    if data.spec is not None and data.spec != spec:
        raise ValueError(f"scan is labelled {data.spec.label}, fit requested for {spec.label}")
    fixed = _resolve_fixed(fixed)
    if init is None:
        init = initial_guess(data, spec, background=fixed.get("background") or 0.0)
    held = {k: v for k, v in fixed.items() if v is not None}
    base = replace(init, **held)
    free = tuple(n for n in PARAM_NAMES if n not in fixed)
    dof = len(data) - len(free)
    if dof <= 0:
        raise FitError(f"{len(data)} records cannot constrain {len(free)} free parameters")

    prob = _Problem(data, spec, base, free)
    p = base.as_array(free)
    r = prob.residuals(p)
    chi = float(r @ r)
    lam = 1e-3
    converged = False
    message = "iteration limit reached"
    it = 0
    for it in range(1, max_iter + 1):
        jac = prob.jacobian(p)
        normal = jac.T @ jac
        grad = jac.T @ r
        if chi == 0.0:
            converged, message = True, "exact fit"
            break
        _check_normal_matrix(normal, free)
        dnorm = np.diag(normal)
        while True:
            try:
                step = np.linalg.solve(normal + lam * np.diag(dnorm), -grad)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = prob.project(p + step, p)
            r_trial = prob.residuals(trial)
            chi_trial = float(r_trial @ r_trial)
            rel_step = float(np.max(np.abs(trial - p) / (np.abs(p) + prob.scales(p))))
            if chi_trial <= chi:
                p, r, chi = trial, r_trial, chi_trial
                lam = max(lam / 10, 1e-12)
                break
            lam *= 10
            if rel_step < xtol or lam > 1e16:
                break
        if rel_step < xtol:
            converged, message = True, "relative parameter step below tolerance"
            break
    else:
        _logger.info("fit did not converge in %d iterations", max_iter)

    jac = prob.jacobian(p)
    normal = jac.T @ jac
    _check_normal_matrix(normal, free)
    s2 = chi / dof
    cov = s2 * np.linalg.inv(normal)
    cov = 0.5 * (cov + cov.T)
    params = base.with_values(free, p)
    width, fwhm_err = _derived_width(spec, params, free, cov)
    c = _coeff_array(spec)
    enh = float(np.sum(c * params.visibility ** np.arange(len(c))) / c[0]) if c[0] else None
    return FitResult(params, free, cov, chi, dof, width, fwhm_err, enh, converged, it, message, init)


def _derived_width(spec: OutcomeSpec, params: FitModelParams, free, cov) -> Tuple[WidthReport, float]:
    vis = params.visibility
    if vis <= 0:
        return WidthReport(spec, None, None, None, FeatureKind.FLAT), float("nan")
    report = feature_fwhm(spec, GaussianSource.from_delta_tau(params.width, vis))
    if report.fwhm is None:
        return report, float("nan")
    # the feature width scales linearly with the coherence time
    grad = np.zeros(len(free))
    if "width" in free:
        grad[free.index("width")] = report.fwhm / params.width
    if "visibility" in free:
        h = 1e-6
        lo, hi = max(vis - h, 1e-9), min(vis + h, 1.0)
        f_hi = feature_fwhm(spec, GaussianSource.from_delta_tau(params.width, hi)).fwhm
        f_lo = feature_fwhm(spec, GaussianSource.from_delta_tau(params.width, lo)).fwhm
        grad[free.index("visibility")] = (f_hi - f_lo) / (hi - lo)
    var = float(grad @ cov @ grad)
    return report, math.sqrt(max(var, 0.0))


def synth_scan(
    spec: OutcomeSpec,
    params: FitModelParams,
    grid,
    seed: Optional[int] = None,
    label: str = "synthetic",
) -> ScanData:
    """Poisson counts around the model; identical seed gives identical counts."""
    tau = np.asarray(grid, dtype=float)
    if tau.size == 0:
        raise ValueError("delay grid is empty")
    mean = np.atleast_1d(model_counts(params, spec, tau))
    rng = np.random.default_rng(seed)
    return ScanData(tau, rng.poisson(mean).astype(float), spec, label)
