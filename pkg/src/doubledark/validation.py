"""Self-consistency checks run by ``doubledark validate``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coherent import equivalent_scheme
from .dynamics import density_matrix_defects, probe_response
from .exceptions import DoubleDarkError, ParameterError
from .model import ScanGrid, SystemParams, validate_params
from .response import chi_analytic, chi_numeric, closed_form_applies, scan, transparency_points

ORACLE_TOL = 1e-4
ZERO_TOL = 1e-6
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
BASIS_TOL = 1e-10


@dataclass
class Check:
    name: str
    value: Optional[float]
    bound: Optional[float]
    passed: bool
    skipped: bool = False
    note: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def add(self, name, value, bound, passed, note=""):
        self.checks.append(Check(name, value, bound, bool(passed), note=note))

    def skip(self, name, note):
        self.checks.append(Check(name, None, None, True, skipped=True, note=note))

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "bound": c.bound,
                    "status": "skipped" if c.skipped else ("pass" if c.passed else "fail"),
                    "note": c.note,
                }
                for c in self.checks
            ],
        }


def _oracle_check(report, p, grid):
    if not closed_form_applies(p):
        report.skip("analytic_vs_numeric", "closed form assumes all atoms in b (pump or refill of c/d present)")
        return
    start = time.perf_counter()
    res = scan(p, grid, "both")
    elapsed = time.perf_counter() - start
    if res.failures:
        report.add("analytic_vs_numeric", None, ORACLE_TOL, False, f"{len(res.failures)} failed points")
        return
    _, ana = res.arrays("analytic")
    _, num = res.arrays("numeric")
    rel = float(np.max(np.abs(num - ana)) / np.max(np.abs(ana)))
    report.add("analytic_vs_numeric", rel, ORACLE_TOL, rel < ORACLE_TOL,
               f"{grid.points} points in {elapsed:.2f} s")


def _zero_check(report, p):
    if not closed_form_applies(p) or p.gamma_0 != 0:
        report.skip("transparency_zeros", "exact zeros need gamma_0 = 0 and no pump")
        return
    worst = 0.0
    for x in transparency_points(p):
        worst = max(worst, abs(chi_numeric(p, x)), abs(chi_analytic(p, x)))
    report.add("transparency_zeros", worst, ZERO_TOL, worst < ZERO_TOL)


def _state_check(report, p, deltas):
    herm = trace = 0.0
    min_eig = np.inf
    for x in deltas:
        _, rho = probe_response(p, x, check_linearity=False, return_state=True)
        d = density_matrix_defects(rho)
        herm, trace = max(herm, d["hermiticity"]), max(trace, d["trace"])
        min_eig = min(min_eig, d["min_eigenvalue"])
    report.add("hermiticity", herm, HERMITICITY_TOL, herm <= HERMITICITY_TOL)
    report.add("trace", trace, TRACE_TOL, trace <= TRACE_TOL)
    report.add("positivity", min_eig, -POSITIVITY_TOL, min_eig >= -POSITIVITY_TOL)


def _basis_check(report, p, deltas):
    schemes = ["upper-doublet"]
    if p.delta_c == 0:
        schemes.append("lower-doublet")
    else:
        report.skip("basis_invariance[lower-doublet]", "needs delta_c = 0")
    for which in schemes:
        _, u = equivalent_scheme(p, which)
        worst = max(
            abs(chi_numeric(p, x, basis=u, check_linearity=False) - chi_numeric(p, x, check_linearity=False))
            for x in deltas
        )
        report.add(f"basis_invariance[{which}]", float(worst), BASIS_TOL, worst <= BASIS_TOL)


def run_validation(raw: dict, grid: Optional[ScanGrid] = None) -> ValidationReport:
    """Run every consistency check on the parameters in ``raw``.

    ``raw`` is the flat parameter mapping; invalid parameters produce a
    failed ``parameters`` check rather than an exception.
    """
    report = ValidationReport()
    try:
        p = raw if isinstance(raw, SystemParams) else validate_params(raw)
    except ParameterError as exc:
        report.add("parameters", None, None, False, "; ".join(exc.violations))
        return report
    report.add("parameters", None, None, True)
    grid = grid or ScanGrid(-3.0, 3.0, 201)
    spot = np.linspace(grid.delta_min, grid.delta_max, 21)
    try:
        _oracle_check(report, p, grid)
        _zero_check(report, p)
        _state_check(report, p, spot)
        _basis_check(report, p, spot)
    except DoubleDarkError as exc:
        report.add("solver", None, None, False, f"{type(exc).__name__}: {exc}")
    return report
