"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Tolerances are pinned here and never loosened.  Criteria that the model
does not meet are left failing.
"""

import math
import time
import warnings

import numpy as np
import pytest

from doubledark import (
    ScanGrid,
    SystemParams,
    chi_analytic,
    chi_numeric,
    density_matrix_defects,
    dip_width,
    dressed_exact,
    dressed_perturbative,
    equivalent_scheme,
    figure_params,
    find_zeros,
    fit_lorentzian,
    gain_threshold_analytic,
    gain_threshold_numeric,
    min_absorption,
    probe_response,
    scan,
    transparency_points,
)
from doubledark.model import A
from doubledark.response import SusceptibilitySample, feature_window

from conftest import ACCEPTANCE_LINES

ZERO_BOUND = 1e-6
ZERO_LOCATION_TOL = 1e-4
HEIGHT_TOL = 0.02
WIDTH_TOL = 0.20
INTERSECTION_TOL = 0.30
ORACLE_TOL = 1e-4
RUNTIME_LIMIT = 5.0
POPULATION_BOUND = 1e-2
THRESHOLD_TOL = 0.30
INDEX_ABSORPTION_BOUND = 1e-3
INDEX_BOUND = 0.1
DRESSED_FACTOR = 5.0
DRESSED_DRAWS = 100
BASIS_TOL = 1e-10
HERMITICITY_TOL = TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


def report(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def test_criterion_1_transparency_splitting(fig2a):
    worst = max(abs(chi_numeric(fig2a, x)) for x in (0.2, -0.2))
    res = scan(fig2a, ScanGrid(-3, 3, 401), "numeric")
    zeros = find_zeros(res.samples, fig2a)
    expected = sorted(transparency_points(fig2a))
    located = len(zeros) == 2 and all(abs(z - e) < ZERO_LOCATION_TOL for z, e in zip(zeros, expected))
    err = max(abs(z - e) for z, e in zip(zeros, expected)) if len(zeros) == 2 else math.inf
    report(1, "transparency splitting", worst < ZERO_BOUND and located,
           f"max|chi(+-0.2)| = {worst:.2e} (< {ZERO_BOUND:g}); zeros {np.round(zeros, 8).tolist()} "
           f"error {err:.1e} (< {ZERO_LOCATION_TOL:g})")


def test_criterion_2_feature_height(fig2a):
    target = 2 / 3
    ana = chi_analytic(fig2a, 0.0).imag
    num = chi_numeric(fig2a, 0.0).imag
    dev = max(abs(ana - target), abs(num - target)) / target
    report(2, "interference-feature height", dev < HEIGHT_TOL,
           f"Im chi(0) analytic {ana:.6f}, numeric {num:.6f} vs 2/3; deviation {dev:.1e} (< {HEIGHT_TOL:g})")


def test_criterion_3_feature_width(fig2a):
    gamma0 = 0.12
    res = scan(fig2a, ScanGrid(-3, 3, 401), "numeric")
    xs, chi = res.arrays("numeric")
    lower, upper = sorted(transparency_points(fig2a))
    inside = (xs > lower) & (xs < upper)
    _, centre, hwhm = fit_lorentzian(xs[inside], chi.imag[inside])
    dev = abs(hwhm - gamma0) / gamma0
    report(3, "feature width", dev < WIDTH_TOL,
           f"Lorentzian fit HWHM {hwhm:.4f} at {centre:+.1e} vs 0.12; deviation {dev:.0%} (< {WIDTH_TOL:.0%})")


def test_criterion_4_intersection_width(fig2b):
    target = 0.0533
    centre, width = dip_width(fig2b, method="numeric")
    zeros = find_zeros(scan(fig2b, ScanGrid(-3, 3, 401), "numeric").samples, fig2b)
    near = any(abs(z - 1.0) < 0.1 for z in zeros)
    dev = abs(width - target) / target
    report(4, "intersection-regime dip", dev < INTERSECTION_TOL and abs(centre - 1.0) < 0.1 and near,
           f"dip at {centre:.4f} with FWHM {width:.4f} vs {target}; deviation {dev:.1%} "
           f"(< {INTERSECTION_TOL:.0%}); zero near 1: {near}")


def test_criterion_5_oracle_equivalence():
    worst = 0.0
    start = time.perf_counter()
    for name in ("fig2a", "fig2b"):
        res = scan(figure_params(name), ScanGrid(-3, 3, 201), "both")
        _, ana = res.arrays("analytic")
        _, num = res.arrays("numeric")
        worst = max(worst, np.max(np.abs(num - ana)) / np.max(np.abs(ana)))
    elapsed = time.perf_counter() - start
    report(5, "oracle equivalence", worst < ORACLE_TOL and elapsed < RUNTIME_LIMIT,
           f"max relative deviation {worst:.1e} (< {ORACLE_TOL:g}); {elapsed:.2f} s for both sets "
           f"(< {RUNTIME_LIMIT:g} s)")


def test_criterion_6_gain(fig3a):
    delta, im_min = min_absorption(fig3a)
    wide = min(chi_numeric(fig3a, x, check_linearity=False).imag for x in ScanGrid(-3, 3, 201).deltas)
    im_min = min(im_min, wide)
    _, rho = probe_response(fig3a, delta, return_state=True)
    rho_aa = rho[A, A].real
    report(6, "optical gain", im_min < 0 and rho_aa < POPULATION_BOUND,
           f"min Im chi {im_min:.4f} at delta {delta:+.2e} (< 0); rho_aa {rho_aa:.2e} (< {POPULATION_BOUND:g})")


def test_criterion_7_gain_threshold(fig3a):
    analytic = gain_threshold_analytic(fig3a)
    numeric = gain_threshold_numeric(fig3a, 1e-5, 1e-2)
    dev = abs(numeric - analytic) / analytic
    report(7, "gain threshold", dev < THRESHOLD_TOL,
           f"numeric {numeric:.3e} vs analytic {analytic:.1e}; deviation {dev:.0%} (< {THRESHOLD_TOL:.0%})")




def test_criterion_8_index_without_absorption(fig3b):
    xs = np.union1d(ScanGrid(-3, 3, 601).deltas, feature_window(fig3b, span=50, points=2001).deltas)
    chi = np.array([chi_numeric(fig3b, x, check_linearity=False) for x in xs])
    samples = [SusceptibilitySample(float(x), complex(c), "numeric") for x, c in zip(xs, chi)]
    zeros = find_zeros(samples, fig3b, threshold=INDEX_ABSORPTION_BOUND)
    cand_x = list(xs[np.abs(chi.imag) < INDEX_ABSORPTION_BOUND]) + zeros
    cand = [(x, chi_numeric(fig3b, x, check_linearity=False)) for x in cand_x]
    cand = [(x, c) for x, c in cand if abs(c.imag) < INDEX_ABSORPTION_BOUND]
    best = max(cand, key=lambda xc: xc[1].real) if cand else (math.nan, complex(math.nan))
    report(8, "index without absorption", bool(cand) and best[1].real > INDEX_BOUND,
           f"{len(cand)} points with |Im chi| < {INDEX_ABSORPTION_BOUND:g}; largest Re chi there "
           f"{best[1].real:+.4f} at delta {best[0]:.5f} (needs > {INDEX_BOUND:g}); "
           f"Re chi range {min(c.real for _, c in cand):+.4f}..{best[1].real:+.4f}")


def test_criterion_9a_density_matrix_invariants():
    herm = trace = 0.0
    min_eig = math.inf
    solves = 0
    for name in ("fig2a", "fig2b", "fig3a", "fig3b"):
        p = figure_params(name)
        xs = np.concatenate([ScanGrid(-3, 3, 61).deltas, feature_window(p, points=41).deltas])
        for x in xs:
            _, rho = probe_response(p, x, check_linearity=False, return_state=True)
            d = density_matrix_defects(rho)
            herm, trace = max(herm, d["hermiticity"]), max(trace, d["trace"])
            min_eig = min(min_eig, d["min_eigenvalue"])
            solves += 1
    ok = herm <= HERMITICITY_TOL and trace <= TRACE_TOL and min_eig >= -POSITIVITY_TOL
    report("9a", "density-matrix invariants", ok,
           f"{solves} solves: hermiticity {herm:.1e}, trace {trace:.1e} (<= 1e-10); "
           f"min eigenvalue {min_eig:.1e} (>= -1e-8)")


def dressed_draws(seed=0, count=DRESSED_DRAWS):
    rng = np.random.default_rng(seed)
    while count:
        base = SystemParams(omega=rng.uniform(0.5, 2), delta0=rng.uniform(-1, 1), delta_c=rng.uniform(-1, 1))
        omega_c = rng.uniform(0, 0.1) * math.sqrt(abs(base.omega_tilde_sq))
        yield base.replace(omega_c=omega_c)
        count -= 1


def test_criterion_9b_dressed_frequencies():
    ratios = []
    for p in dressed_draws():
        err = np.max(np.abs(dressed_perturbative(p).frequencies - dressed_exact(p).frequencies))
        ratios.append(err / (DRESSED_FACTOR * p.omega_c**2 / math.sqrt(abs(p.omega_tilde_sq))))
    bad = sum(r > 1 for r in ratios)
    report("9b", "dressed perturbative vs exact", bad == 0,
           f"{bad}/{len(ratios)} draws exceed 5 Omega_c^2/|Omega_tilde| (worst ratio {max(ratios):.2f})")


def test_criterion_9c_basis_invariance():
    worst = 0.0
    for name in ("fig2a", "fig2b", "fig3a", "fig3b"):
        p = figure_params(name)
        schemes = ["upper-doublet"] + (["lower-doublet"] if p.delta_c == 0 else [])
        for which in schemes:
            _, u = equivalent_scheme(p, which)
            for x in ScanGrid(-3, 3, 41).deltas:
                diff = abs(chi_numeric(p, x, basis=u, check_linearity=False)
                           - chi_numeric(p, x, check_linearity=False))
                worst = max(worst, diff)
    report("9c", "basis invariance", worst <= BASIS_TOL,
           f"max |chi_rotated - chi| {worst:.1e} (<= {BASIS_TOL:g}) for both equivalent schemes")
