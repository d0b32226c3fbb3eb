"""Command-line front end.

Exit codes: 0 success, 2 usage or malformed input, 3 oracle disagreement,
4 fit failure or non-convergence, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from . import __version__
from .decomposition import (
    OutcomeSpec,
    coefficients,
    coefficients_closed_form_N0,
    type_probabilities,
    type_weight,
)
from .fitting import FitError, FitModelParams, ScanData, fit, synth_scan
from .oracle import oracle_probability
from .signal import FeatureKind, Family, GaussianSource, feature_fwhm, probability_curve, ratio_sweep

SCHEMA_VERSION = "1.0"
FS = 1e-15
ORACLE_TOL = 1e-10
CSV_HEADER = "delay_fs,counts"
OUTDIR_ENV = "FOCKHOM_OUTDIR"

EXIT_OK, EXIT_USAGE, EXIT_ORACLE, EXIT_FIT, EXIT_IO = 0, 2, 3, 4, 5

PARAM_ALIASES = {
    "a": "amplitude", "amplitude": "amplitude",
    "b": "background", "background": "background",
    "tau0": "center", "center": "center",
    "dtau": "width", "width": "width",
    "v": "visibility", "visibility": "visibility",
}


class UsageError(Exception):
    pass


class ScanFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


# --------------------------------------------------------------------------
# CSV I/O
# --------------------------------------------------------------------------

def read_scan_csv(stream: TextIO, spec: Optional[OutcomeSpec] = None, label: str = "") -> Tuple[ScanData, Dict[str, str]]:
    """Parse a ``delay_fs,counts`` scan; ``# key=value`` comments become metadata."""
    meta: Dict[str, str] = {}
    delays: List[float] = []
    counts: List[float] = []
    header_seen = False
    last_line = 0
    for lineno, raw in enumerate(stream, start=1):
        last_line = lineno
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line.replace(" ", "") != CSV_HEADER:
                raise ScanFormatError(lineno, f"expected header '{CSV_HEADER}', got '{line}'")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ScanFormatError(lineno, f"expected 2 fields, got {len(fields)}")
        try:
            delays.append(float(fields[0]))
            counts.append(float(fields[1]))
        except ValueError:
            raise ScanFormatError(lineno, f"non-numeric field in '{line}'") from None
    if not header_seen:
        raise ScanFormatError(last_line + 1, f"missing header '{CSV_HEADER}'")
    try:
        data = ScanData(np.array(delays), np.array(counts), spec, label)
    except ValueError as exc:
        raise ScanFormatError(last_line, str(exc)) from None
    return data, meta


def write_scan_csv(stream: TextIO, data: ScanData, meta: Dict[str, object]) -> None:
    for key, value in meta.items():
        stream.write(f"# {key}={value}\n")
    stream.write(CSV_HEADER + "\n")
    for tau, n in zip(data.delays, data.counts):
        stream.write(f"{tau:.12g},{int(n)}\n")


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _spec(args) -> OutcomeSpec:
    try:
        return OutcomeSpec(args.photons, args.outcome)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be start:stop:step, got '{text}'") from None
    if step <= 0 or not all(map(math.isfinite, (start, stop, step))):
        raise UsageError(f"grid step must be positive and finite, got '{text}'")
    if stop < start:
        raise UsageError(f"grid stop {stop:g} lies before start {start:g}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _source(args, visibility: float = 1.0) -> Optional[GaussianSource]:
    """Bandwidth in fs units: delta_omega is converted to rad/fs."""
    try:
        if getattr(args, "delta_tau", None) is not None:
            return GaussianSource.from_delta_tau(args.delta_tau, visibility)
        if getattr(args, "delta_omega", None) is not None:
            return GaussianSource(args.delta_omega * FS, visibility)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return None


def _envelope(command: str, inputs: dict, results, provenance: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "provenance": {"package": "fockhom", "version": __version__, **provenance},
    }


def _inputs(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "command")}


def _emit(doc: dict, out: TextIO) -> None:
    json.dump(doc, out, indent=2)
    out.write("\n")


def _fmt(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_coeffs(args, out: TextIO) -> int:
    spec = _spec(args)
    if args.closed_form:
        if spec.m not in (0, spec.N):
            raise UsageError("--closed-form applies only to outcome 0 (or N)")
        poly = coefficients_closed_form_N0(spec.N)
        path = "closed-form binomial squares"
    else:
        poly = coefficients(spec)
        path = "exact type decomposition"
    if args.format == "tsv":
        out.write("k\tc_k\n")
        for k, c in enumerate(poly.coeffs):
            out.write(f"{k}\t{c}\n")
        return EXIT_OK
    results = {"outcome": spec.label, "index": "k = power of I", "coefficients": list(poly.as_strings())}
    if args.details:
        results["type_probabilities"] = {
            str(d): str(type_probabilities(spec.N, d)[spec.m]) for d in range(spec.N // 2 + 1)
        }
        results["type_weights"] = {
            str(d): [str(c) for c in type_weight(spec.N, d).coeffs] for d in range(spec.N // 2 + 1)
        }
    _emit(_envelope("coeffs", _inputs(args), results, {"path": path, "arithmetic": "exact rational"}), out)
    return EXIT_OK


def cmd_curve(args, out: TextIO) -> int:
    spec = _spec(args)
    grid = _parse_grid(args.grid)
    source = _source(args, args.visibility)
    curve = probability_curve(spec, source, grid)
    if args.format == "tsv":
        out.write("tau_fs\tP\n")
        for tau, p in zip(curve.tau, curve.probability):
            out.write(f"{tau:.17g}\t{p:.17g}\n")
        return EXIT_OK
    results = {"outcome": spec.label, "delta_tau_fs": source.delta_tau,
               "tau_fs": curve.tau.tolist(), "P": curve.probability.tolist()}
    _emit(_envelope("curve", _inputs(args), results, {"path": "float64 polynomial evaluation"}), out)
    return EXIT_OK


def cmd_width(args, out: TextIO) -> int:
    spec = _spec(args)
    source = _source(args)
    if source is None:
        if not args.relative:
            raise UsageError("absolute widths need --delta-tau or --delta-omega (or pass --relative)")
        source = GaussianSource(1.0)
    report = feature_fwhm(spec, source)
    flat = report.feature_kind is FeatureKind.FLAT
    results = {
        "outcome": spec.label,
        "feature_kind": report.feature_kind.value,
        "ratio_to_11": report.ratio_to_11,
        "enhancement": None if report.enhancement is None else float(report.enhancement),
    }
    if not args.relative:
        results["fwhm_fs"] = report.fwhm
        results["delta_tau_fs"] = source.delta_tau
    if args.format == "tsv":
        value = report.ratio_to_11 if args.relative else report.fwhm
        out.write(f"{spec.label}\t{'flat' if flat else _fmt(value)}\t{report.feature_kind.value}\n")
        return EXIT_OK
    _emit(_envelope("width", _inputs(args), results, {"path": "bisection", "rtol": 1e-13}), out)
    return EXIT_OK


def cmd_sweep(args, out: TextIO) -> int:
    if args.max_photons < 2 or args.max_photons % 2:
        raise UsageError(f"--max-photons must be even and >= 2, got {args.max_photons}")
    table = ratio_sweep(args.max_photons, args.family)
    for N, why in table.skipped:
        print(f"notice: N={N} skipped ({why})", file=sys.stderr)
    if args.format == "tsv":
        out.write("N\tm\tratio\tasymptote\n")
        for row in table.rows:
            asym = "" if row.asymptote is None else _fmt(row.asymptote)
            out.write(f"{row.N}\t{row.m}\t{_fmt(row.ratio)}\t{asym}\n")
        return EXIT_OK
    results = {
        "family": table.family.value,
        "rows": [{"N": r.N, "m": r.m, "ratio": r.ratio, "asymptote": r.asymptote} for r in table.rows],
        "skipped": [{"N": N, "reason": why} for N, why in table.skipped],
    }
    _emit(_envelope("sweep", _inputs(args), results, {"path": "bisection on exact coefficients"}), out)
    return EXIT_OK


def cmd_oracle(args, out: TextIO) -> int:
    spec = _spec(args)
    if spec.N > args.max_check_N:
        raise UsageError(f"oracle limited to N <= {args.max_check_N}")
    try:
        indist = Fraction(args.indist)
    except ValueError:
        raise UsageError(f"cannot parse indistinguishability '{args.indist}'") from None
    if not 0 <= indist <= 1:
        raise UsageError("indistinguishability must lie in [0, 1]")
    exact = coefficients(spec)(indist)
    numeric = oracle_probability(spec.N, spec.m, I=float(indist))
    diff = abs(float(exact) - numeric)
    agree = diff <= ORACLE_TOL
    results = {"outcome": spec.label, "I": str(indist), "exact": str(exact),
               "exact_float": float(exact), "oracle": numeric, "abs_diff": diff, "agree": agree}
    _emit(_envelope("oracle", _inputs(args), results, {"tolerance": ORACLE_TOL}), out)
    return EXIT_OK if agree else EXIT_ORACLE


def _param_name(text: str) -> str:
    try:
        return PARAM_ALIASES[text.strip().lower()]
    except KeyError:
        raise UsageError(f"unknown parameter '{text}'") from None


def cmd_fit(args, out: TextIO) -> int:
    spec = _spec(args)
    try:
        with open(args.input, encoding="utf-8") as fh:
            data, meta = read_scan_csv(fh, spec, label=args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScanFormatError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    fixed: Dict[str, Optional[float]] = {"background": 0.0, "visibility": 1.0}
    for name in args.free or ():
        fixed.pop(_param_name(name), None)
    for item in args.fix or ():
        if "=" not in item:
            raise UsageError(f"--fix expects NAME=VALUE, got '{item}'")
        name, value = item.split("=", 1)
        try:
            fixed[_param_name(name)] = float(value)
        except ValueError:
            raise UsageError(f"--fix value for {name} is not a number") from None

    inputs = _inputs(args)
    provenance = {"weighting": "1/max(counts,1)", "xtol": 1e-8, "max_iter": 200, "delay_unit": "fs"}
    try:
        result = fit(data, spec, fixed=fixed)
    except FitError as exc:
        doc = _envelope("fit", inputs, {"converged": False, "error": type(exc).__name__, "diagnostic": str(exc)}, provenance)
        _emit(doc, out)
        return EXIT_FIT

    params = result.params.as_dict()
    results = {
        "outcome": spec.label,
        "converged": result.converged,
        "iterations": result.iterations,
        "message": result.message,
        "params": params,
        "stderr": {n: result.stderr(n) for n in result.free},
        "free": list(result.free),
        "covariance": result.covariance.tolist(),
        "chi_square": result.chi_square,
        "dof": result.dof,
        "reduced_chi_square": result.reduced_chi_square,
        "fwhm_fs": result.width.fwhm,
        "fwhm_err_fs": result.fwhm_err,
        "feature_kind": result.width.feature_kind.value,
        "enhancement": result.enhancement,
    }
    if args.seed_report:
        results["scan_metadata"] = meta
    _emit(_envelope("fit", inputs, results, provenance), out)
    return EXIT_OK if result.converged else EXIT_FIT


def cmd_synth(args, out: TextIO) -> int:
    spec = _spec(args)
    grid = _parse_grid(args.grid)
    try:
        params = FitModelParams(amplitude=args.amplitude, width=args.delta_tau, center=args.center,
                                background=args.background, visibility=args.visibility)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = synth_scan(spec, params, grid, seed=args.seed)
    meta = {"generator": "fockhom synth", "photons": spec.N, "outcome": spec.m,
            "amplitude": repr(args.amplitude), "delta_tau_fs": repr(args.delta_tau),
            "center_fs": repr(args.center), "background": repr(args.background),
            "visibility": repr(args.visibility), "grid": args.grid, "seed": args.seed}
    if args.out == "-":
        write_scan_csv(out, data, meta)
        return EXIT_OK
    # relative paths land under the override directory when it is set
    path = os.path.join(os.environ.get(OUTDIR_ENV, ""), args.out)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            write_scan_csv(fh, data, meta)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_outcome(p: argparse.ArgumentParser) -> None:
    p.add_argument("--photons", "-N", type=int, required=True, help="total photon number (even)")
    p.add_argument("--outcome", "-m", type=int, required=True, help="photons detected at output d")


def _add_bandwidth(p: argparse.ArgumentParser, required: bool) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--delta-tau", type=float, help="single-photon coherence time, FWHM in fs")
    g.add_argument("--delta-omega", type=float, help="spectral bandwidth in rad/s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockhom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="exact coefficients of P(I) for one outcome")
    _add_outcome(p)
    p.add_argument("--closed-form", action="store_true", help="use the binomial-square formula (outcome 0)")
    p.add_argument("--details", action="store_true", help="include per-type probabilities and weights")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("curve", help="P(tau) on a delay grid")
    _add_outcome(p)
    _add_bandwidth(p, required=True)
    p.add_argument("--grid", required=True, help="start:stop:step in fs")
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("width", help="feature FWHM and enhancement")
    _add_outcome(p)
    _add_bandwidth(p, required=False)
    p.add_argument("--relative", action="store_true", help="report the ratio to the two-photon width")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_width)

    p = sub.add_parser("sweep", help="width ratio versus photon number")
    p.add_argument("--max-photons", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in Family], default="N0")
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="compare exact and dense numeric probabilities")
    _add_outcome(p)
    p.add_argument("--indist", required=True, help="indistinguishability, decimal or p/q")
    p.add_argument("--max-check-N", type=int, default=8)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit", help="fit a delay_fs,counts scan")
    _add_outcome(p)
    p.add_argument("--input", required=True)
    p.add_argument("--free", action="append", metavar="NAME", help="release a default-fixed parameter (v, B)")
    p.add_argument("--fix", action="append", metavar="NAME=VALUE", help="hold a parameter at a value")
    p.add_argument("--seed-report", action="store_true", help="echo the scan's comment metadata")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("synth", help="write a Poisson-sampled synthetic scan")
    _add_outcome(p)
    p.add_argument("--amplitude", type=float, required=True)
    p.add_argument("--delta-tau", type=float, required=True, help="fs")
    p.add_argument("--center", type=float, default=0.0, help="fs")
    p.add_argument("--background", type=float, default=0.0)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--grid", required=True, help="start:stop:step in fs")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=cmd_synth)
    return parser


def _bind_grid(argv: Sequence[str]) -> List[str]:
    # grids like -1200:1200:30 would otherwise be read as an option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--grid":
            out.append(f"--grid={next(it, '')}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_bind_grid(sys.argv[1:] if argv is None else argv))
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
