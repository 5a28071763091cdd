"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error,
3 computation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings

from .coherent import dressed_exact, dressed_perturbative
from .exceptions import DoubleDarkError, OutsideRegime, ParameterError, RegimeWarning, ValidityViolated
from .model import ScanGrid, validate_params
from .response import (
    closed_form_applies,
    find_zeros,
    gain_threshold_analytic,
    gain_threshold_numeric,
    interference_feature,
    intersection_width,
    scan,
    transparency_points,
)
from .validation import run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3
CSV_HEADER = ["delta", "chi_re_analytic", "chi_im_analytic", "chi_re_numeric", "chi_im_numeric"]
DEFAULT_GRID = (-3.0, 3.0, 401)
_SCAN_KEYS = ("delta_min", "delta_max", "points")
_RUN_KEYS = ("method", "out")


class ConfigError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.12g}"


def num(x):
    """JSON-safe number rounded to 12 significant digits."""
    if x is None or not math.isfinite(x):
        return None
    return float(fmt(x))


def load_config(path: str):
    """Read a flat JSON config; returns ``(raw_params, grid, extras)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    doc = dict(doc)
    block = doc.pop("scan", {})
    if not isinstance(block, dict):
        raise ConfigError("'scan' must be an object")
    for key in _SCAN_KEYS:
        if key in doc:
            block[key] = doc.pop(key)
    extras = {k: doc.pop(k) for k in _RUN_KEYS if k in doc}
    lo, hi, n = DEFAULT_GRID
    try:
        grid = ScanGrid(float(block.get("delta_min", lo)), float(block.get("delta_max", hi)),
                        int(block.get("points", n)))
    except (TypeError, ValueError, ParameterError) as exc:
        raise ConfigError(f"invalid scan block: {exc}") from None
    return doc, grid, extras


def _params(raw):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return validate_params(raw)
    except ParameterError as exc:
        raise ConfigError("invalid parameters: " + "; ".join(exc.violations)) from None


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def cmd_scan(args) -> int:
    raw, grid, extras = load_config(args.config)
    p = _params(raw)
    method = args.method or extras.get("method", "both")
    if method not in ("analytic", "numeric", "both"):
        raise ConfigError(f"unknown method {method!r}")
    out = args.out or extras.get("out")
    if not out:
        raise ConfigError("no output path (--out)")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = scan(p, grid, method)
    deltas = [float(x) for x in grid.deltas]
    index = {x: i for i, x in enumerate(deltas)}
    rows = [[fmt(x), "", "", "", ""] for x in deltas]
    for s in res.samples:
        row = rows[index[s.delta]]
        col = 1 if s.method == "analytic" else 3
        row[col], row[col + 1] = fmt(s.chi.real), fmt(s.chi.imag)
    try:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc}") from None
    if res.failures:
        for x, m, msg in res.failures:
            print(f"failed at delta={fmt(x)} ({m}): {msg}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def _dressed_doc(ds):
    vectors = {}
    labels = ds.labels or [str(k) for k in range(3)]
    for k, label in enumerate(labels):
        v = ds.vectors[:, k]
        vectors[label] = {"re": [num(z.real) for z in v], "im": [num(z.imag) for z in v]}
    return {
        "kind": ds.kind,
        "labels": list(ds.labels) if ds.labels else None,
        "frequencies": [num(w) for w in ds.frequencies],
        "amplitudes": vectors,
        "basis": ["a", "c", "d"],
        "flags": list(ds.flags),
        "omega0_sq": num(ds.omega0_sq),
        "omega_tilde_sq": num(ds.omega_tilde_sq),
    }


def cmd_dressed(args) -> int:
    raw, _, _ = load_config(args.config)
    p = _params(raw)
    exact = dressed_exact(p, allow_degenerate=args.allow_degenerate)
    try:
        pert = _dressed_doc(dressed_perturbative(p))
    except ValidityViolated as exc:
        pert = {"kind": "perturbative", "flags": ["ValidityViolated"], "error": str(exc)}
    _emit({"exact": _dressed_doc(exact), "perturbative": pert})
    return EXIT_OK


def cmd_features(args) -> int:
    raw, grid, _ = load_config(args.config)
    p = _params(raw)
    doc = {}
    status = EXIT_OK
    if p.omega_c == 0:
        doc["dark_line"] = num(p.delta0)
        doc["interference_feature"] = None
    else:
        doc["transparency_points"] = [num(x) for x in transparency_points(p)]
        try:
            f = interference_feature(p)
            doc["interference_feature"] = {
                "kind": f.kind, "center": num(f.center), "width": num(f.width),
                "height": num(f.height), "validity_flags": f.validity_flags,
            }
        except ValidityViolated as exc:
            doc["interference_feature"] = {"error": "ValidityViolated", "message": str(exc)}
            try:
                doc["intersection_width"] = num(intersection_width(p))
            except OutsideRegime as exc2:
                doc["intersection_width"] = {"error": "OutsideRegime", "message": str(exc2)}
                status = EXIT_COMPUTE
    method = "analytic" if closed_form_applies(p) else "numeric"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = scan(p, grid, method)
        doc["scan_zeros"] = {"method": method, "zeros": [num(z) for z in find_zeros(res.select(method), p)]}
    _emit(doc)
    return status


def cmd_threshold(args) -> int:
    raw, _, _ = load_config(args.config)
    p = _params(raw)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        analytic = gain_threshold_analytic(p)
    doc = {"analytic": num(analytic), "analytic_flags": [str(w.message) for w in caught]}
    status = EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            numeric = gain_threshold_numeric(p, args.r_min, args.r_max)
        doc["numeric"] = num(numeric)
        doc["relative_deviation"] = num(abs(numeric - analytic) / analytic) if analytic else None
    except DoubleDarkError as exc:
        doc["numeric"] = None
        doc["error"] = f"{type(exc).__name__}: {exc}"
        status = EXIT_COMPUTE
    _emit(doc)
    return status


def cmd_validate(args) -> int:
    raw, grid, _ = load_config(args.config)
    if grid.points > 1001:
        grid = ScanGrid(grid.delta_min, grid.delta_max, 1001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_validation(raw, grid)
    doc = report.as_dict()
    for c in doc["checks"]:
        c["value"], c["bound"] = num(c["value"]), num(c["bound"])
    _emit(doc)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doubledark", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan", help="write a susceptibility spectrum as CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--method", choices=("analytic", "numeric", "both"))
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("dressed", help="print exact and first-order dressed states")
    sp.add_argument("--config", required=True)
    sp.add_argument("--allow-degenerate", action="store_true")
    sp.set_defaults(func=cmd_dressed)

    sp = sub.add_parser("features", help="print transparency points and the narrow line")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_features)

    sp = sub.add_parser("threshold", help="compare analytic and numeric gain thresholds")
    sp.add_argument("--config", required=True)
    sp.add_argument("--r-min", type=float, required=True)
    sp.add_argument("--r-max", type=float, required=True)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("validate", help="run the consistency checks")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DoubleDarkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except Exception as exc:  # noqa: BLE001
        print(f"error: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
