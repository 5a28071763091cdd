"""Probe susceptibility: closed form, master-equation solve, scans and features.

``chi`` is reported in units of ``eta / gamma_bar``; ``Im chi > 0`` is
absorption and ``Im chi < 0`` gain.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, curve_fit, minimize_scalar

from .dynamics import probe_response
from .exceptions import (
    DoubleDarkError,
    NoSignChange,
    OutsideRegime,
    RegimeWarning,
    ValidityViolated,
)
from .model import ScanGrid, SystemParams, derived_rates

__all__ = [
    "SusceptibilitySample",
    "SpectralFeature",
    "ScanResult",
    "ZERO_THRESHOLD",
    "chi_analytic",
    "chi_numeric",
    "scan",
    "transparency_points",
    "interference_feature",
    "intersection_width",
    "dip_width",
    "fit_lorentzian",
    "gain_threshold_analytic",
    "gain_threshold_numeric",
    "min_absorption",
    "feature_window",
    "find_zeros",
    "hilbert_real_part",
    "closed_form_applies",
]

METHODS = ("analytic", "numeric")
ZERO_THRESHOLD = 1e-6
FEATURE_GUARD = 10.0
INTERSECTION_TOL = 0.1


@dataclass(frozen=True)
class SusceptibilitySample:
    delta: float
    chi: complex
    method: str


@dataclass
class SpectralFeature:
    kind: str
    center: float
    width: float
    height: float
    validity_flags: list = field(default_factory=list)


@dataclass
class ScanResult:
    """Samples in grid order (methods interleaved per point) plus failed points."""

    samples: list
    failures: list = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def select(self, method: str) -> list:
        return [s for s in self.samples if s.method == method]

    def arrays(self, method: str):
        sel = self.select(method)
        return (np.array([s.delta for s in sel]), np.array([s.chi for s in sel], dtype=complex))


def closed_form_applies(p: SystemParams) -> bool:
    """True when every atom starts in ``b``: no pump and no refill of ``c`` or ``d``."""
    _, r_c, r_d = p.injection_rates
    return p.r_pump == 0 and r_c == 0 and r_d == 0


def chi_analytic(p: SystemParams, delta):
    """Closed-form weak-probe susceptibility; accepts scalar or array ``delta``.

    Written as a single fraction so that two-photon resonance
    (``Gamma_cb = 0``) is regular.
    """
    rates = derived_rates(p)
    d = np.asarray(delta, dtype=float)
    g_ab = rates.gamma_ab + 1j * d
    g_cb = rates.gamma_cb + 1j * (d - p.delta0)
    g_db = rates.gamma_db + 1j * (d - p.delta0 - p.delta_c)
    if p.omega_c == 0.0:
        # d decouples; dividing out Gamma_db keeps its resonance regular
        g = g_cb / (g_ab * g_cb + p.omega**2)
    else:
        num = g_cb * g_db + p.omega_c**2
        g = num / (g_ab * num + p.omega**2 * g_db)
    chi = 1j * p.eta * g
    return complex(chi) if chi.ndim == 0 else chi


def chi_numeric(p: SystemParams, delta: float, basis=None, check_linearity: bool = True) -> complex:
    """Susceptibility from the full steady-state density matrix."""
    return 1j * p.eta * probe_response(p, delta, basis=basis, check_linearity=check_linearity)


def _evaluator(p, method, check_linearity=True):
    if method == "analytic":
        return lambda x: chi_analytic(p, float(x))
    if method == "numeric":
        return lambda x: chi_numeric(p, float(x), check_linearity=check_linearity)
    raise ValueError(f"unknown method {method!r}")


def scan(p: SystemParams, grid: ScanGrid, method: str = "both", check_linearity: bool = True) -> ScanResult:
    """Evaluate ``chi`` on every grid point; failing points are collected, not raised."""
    methods = METHODS if method == "both" else (method,)
    evals = {m: _evaluator(p, m, check_linearity) for m in methods}
    result = ScanResult([])
    for x in grid.deltas:
        for m in methods:
            try:
                chi = evals[m](x)
            except (DoubleDarkError, np.linalg.LinAlgError) as exc:
                result.failures.append((float(x), m, f"{type(exc).__name__}: {exc}"))
                continue
            if not np.isfinite(chi):
                result.failures.append((float(x), m, "non-finite susceptibility"))
                continue
            result.samples.append(SusceptibilitySample(float(x), complex(chi), m))
    return result


def transparency_points(p: SystemParams) -> tuple[float, float]:
    """Probe detunings where the unrelaxed closed form vanishes (upper, lower)."""
    mid = p.delta0 + p.delta_c / 2.0
    half = math.sqrt((p.delta_c / 2.0) ** 2 + p.omega_c**2)
    return mid + half, mid - half


def interference_feature(p: SystemParams) -> SpectralFeature:
    """Centre, width and height of the narrow line produced by the perturbation.

    ``width`` is the full width at half maximum of the approximately
    Lorentzian line.  Raises :class:`ValidityViolated` near the crossing of
    dressed levels, where :func:`intersection_width` applies instead.
    """
    rates = derived_rates(p)
    ot2 = p.omega_tilde_sq
    oc2 = p.omega_c**2
    shifted = ot2 + rates.gamma_ab * p.delta_c
    if abs(ot2) < FEATURE_GUARD * oc2 or abs(shifted) < FEATURE_GUARD * oc2 or ot2 == 0:
        raise ValidityViolated(
            f"Omega_tilde^2 = {ot2:.4g} and Omega_tilde^2 + gamma_ab Delta_c = {shifted:.4g} "
            f"must both exceed {FEATURE_GUARD:g} Omega_c^2 = {FEATURE_GUARD * oc2:.4g} in magnitude"
        )
    center = (p.delta_c + p.delta0) / (1.0 + oc2 / ot2)
    width = rates.gamma_ab * p.omega**2 / abs(ot2) * 2.0 * oc2 / abs(shifted)
    flags = []
    if not closed_form_applies(p):
        flags.append("population-outside-b")
    if p.omega_c == 0:
        flags.append("no-perturbation")
    return SpectralFeature("absorption-peak", center, width, p.eta / rates.gamma_ab, flags)


def intersection_width(p: SystemParams) -> float:
    """Width of the transparency line when a dressed level crosses ``|0>``."""
    if p.delta_c == 0 or p.omega == 0 or abs(p.omega_tilde_sq) > INTERSECTION_TOL * p.omega**2:
        raise OutsideRegime(
            "requires delta_c != 0 and Omega^2 within 10% of Delta_c (Delta_c + Delta_0); "
            f"got Omega_tilde^2 = {p.omega_tilde_sq:.4g}"
        )
    gamma_ab = derived_rates(p).gamma_ab
    return 2.0 * p.omega_c**2 * (p.delta0 + p.delta_c) / (gamma_ab * p.delta_c)


def dip_width(p: SystemParams, half_window: float = 0.25, points: int = 401, method: str = "analytic"):
    """Measure the transparency dip near three-photon resonance.

    The dip depth is ``1 - Im chi / Im chi_ref`` with ``chi_ref`` the
    closed-form spectrum without the perturbation (the master equation is
    not used for the reference: with ``omega_c = 0`` level ``d`` becomes a
    trap).  Returns ``(centre, fwhm)`` of the depth profile around
    ``delta0 + delta_c``.
    """
    ref = p.replace(omega_c=0.0)
    f, f_ref = _evaluator(p, method, False), _evaluator(ref, "analytic")

    def depth(x):
        return 1.0 - f(x).imag / f_ref(x).imag

    c0 = p.delta0 + p.delta_c
    xs = np.linspace(c0 - half_window, c0 + half_window, points)
    ys = np.array([depth(x) for x in xs])
    k = int(np.argmax(ys))
    if ys[k] < 0.5:
        raise OutsideRegime(f"no dip deeper than half the background near {c0:g}")
    above = ys >= 0.5
    lo = k
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = k
    while hi < points - 1 and above[hi + 1]:
        hi += 1
    if lo == 0 or hi == points - 1:
        raise OutsideRegime("dip extends past the measurement window")
    half = lambda x: depth(x) - 0.5  # noqa: E731
    left = brentq(half, xs[lo - 1], xs[lo], xtol=1e-12)
    right = brentq(half, xs[hi], xs[hi + 1], xtol=1e-12)
    centre = minimize_scalar(lambda x: -depth(x), bounds=(left, right), method="bounded",
                             options={"xatol": 1e-10}).x
    return float(centre), float(right - left)


def _lorentzian(x, height, center, hwhm):
    return height * hwhm**2 / ((x - center) ** 2 + hwhm**2)


def fit_lorentzian(deltas, values, p0=None):
    """Least-squares Lorentzian ``(height, center, hwhm)`` fit without baseline."""
    deltas = np.asarray(deltas, dtype=float)
    values = np.asarray(values, dtype=float)
    if p0 is None:
        k = int(np.argmax(np.abs(values)))
        above = np.abs(values) >= 0.5 * abs(values[k])
        span = deltas[above].max() - deltas[above].min() if above.sum() > 1 else np.ptp(deltas) / 10
        p0 = (values[k], deltas[k], max(span / 2, 1e-12))
    popt, _ = curve_fit(_lorentzian, deltas, values, p0=p0, maxfev=20000)
    height, center, hwhm = popt
    return float(height), float(center), float(abs(hwhm))


def gain_threshold_analytic(p: SystemParams) -> float:
    """Pump rate above which the resonant narrow line turns into gain."""
    problems = []
    if p.delta0 != 0 or p.delta_c != 0:
        problems.append("fields not all on resonance")
    if not p.gamma_0 < p.omega_c:
        problems.append("gamma_0 not small compared with Omega_c")
    if p.omega == 0 or p.gamma_d == 0:
        problems.append("threshold diverges (no drive or no decay into d)")
    if problems:
        warnings.warn("gain threshold outside its regime: " + "; ".join(problems), RegimeWarning, stacklevel=2)
    if p.omega == 0 or p.gamma_d == 0:
        return math.inf
    ratio = p.gamma_b / p.gamma_d
    return ratio * (p.omega_c / p.omega) ** 2 * p.gamma_a + (1.0 + ratio) * p.gamma_0


def feature_window(p: SystemParams, span: float = 5.0, points: int = 201) -> ScanGrid:
    """Detuning grid covering ``span`` widths either side of the narrow line."""
    try:
        feat = interference_feature(p)
        center, width = feat.center, feat.width
    except ValidityViolated:
        center = p.delta0 + p.delta_c
        width = 2.0 * p.omega_c**2 / max(derived_rates(p).gamma_ab, 1e-12)
    half = max(span * width, 1e-6)
    return ScanGrid(center - half, center + half, points)


def min_absorption(p: SystemParams, grid: Optional[ScanGrid] = None):
    """Smallest ``Im chi`` (numeric) over ``grid``, refined between grid points.

    Returns ``(delta, im_chi)``.  The default grid is :func:`feature_window`.
    """
    grid = feature_window(p) if grid is None else grid
    xs = grid.deltas
    f = lambda x: chi_numeric(p, float(x), check_linearity=False).imag  # noqa: E731
    ys = np.array([f(x) for x in xs])
    k = int(np.argmin(ys))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.fun < ys[k]:
        return float(res.x), float(res.fun)
    return float(xs[k]), float(ys[k])


def gain_threshold_numeric(
    p: SystemParams,
    r_min: float,
    r_max: float,
    grid: Optional[ScanGrid] = None,
    tol: float = 1e-6,
) -> float:
    """Pump rate at which the minimum of ``Im chi`` over ``grid`` crosses zero."""
    grid = feature_window(p) if grid is None else grid

    def f(r):
        return min_absorption(p.replace(r_pump=float(r)), grid)[1]

    if not r_min < r_max:
        raise NoSignChange(f"empty bracket [{r_min}, {r_max}]")
    f_lo, f_hi = f(r_min), f(r_max)
    if f_lo == 0:
        return float(r_min)
    if f_hi == 0:
        return float(r_max)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(
            f"minimum Im chi is {f_lo:.3g} at r={r_min:g} and {f_hi:.3g} at r={r_max:g}"
        )
    return float(brentq(f, r_min, r_max, xtol=tol))


def find_zeros(samples, p: Optional[SystemParams] = None, threshold: float = ZERO_THRESHOLD) -> list:
    """Transparency points (zeros of ``Im chi``) in a single-method scan.

    Sign changes of ``Im chi`` are bracketed; touching zeros (``Im chi``
    vanishing without a sign change, as at a dark resonance) are found as
    local minima of ``|chi|``.  With ``p`` each candidate is refined by the
    method that produced the samples and kept only if ``|Im chi|`` falls
    below ``threshold``; without ``p`` candidates are interpolated.
    """
    samples = list(samples)
    if not samples:
        return []
    methods = {s.method for s in samples}
    if len(methods) != 1:
        raise ValueError(f"samples mix methods {sorted(methods)}")
    samples.sort(key=lambda s: s.delta)
    xs = np.array([s.delta for s in samples])
    ys = np.array([s.chi for s in samples], dtype=complex)
    im, mag = ys.imag, np.abs(ys)
    f = _evaluator(p, methods.pop(), check_linearity=False) if p is not None else None

    zeros = []
    for i in range(len(xs) - 1):
        if im[i] == 0:
            zeros.append(xs[i])
        elif im[i] * im[i + 1] < 0:
            if f is not None:
                zeros.append(brentq(lambda x: f(x).imag, xs[i], xs[i + 1], xtol=1e-13))
            else:
                zeros.append(xs[i] - im[i] * (xs[i + 1] - xs[i]) / (im[i + 1] - im[i]))
    if im[-1] == 0:
        zeros.append(xs[-1])

    for i in range(1, len(xs) - 1):
        if not (mag[i] <= mag[i - 1] and mag[i] < mag[i + 1]):
            continue
        if im[i - 1] * im[i] < 0 or im[i] * im[i + 1] < 0:
            continue
        if f is not None:
            res = minimize_scalar(lambda x: abs(f(x)), bounds=(xs[i - 1], xs[i + 1]),
                                  method="bounded", options={"xatol": 1e-12})
            if abs(f(res.x).imag) < threshold:
                zeros.append(res.x)
        else:
            # vertex of the parabola through the three samples of Im chi
            x0, x1, x2 = xs[i - 1:i + 2]
            y0, y1, y2 = im[i - 1:i + 2]
            den = (x0 - x1) * (x0 - x2) * (x1 - x2)
            a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
            b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
            xv = -b / (2 * a) if a > 0 else x1
            yv = y1 if a <= 0 else y1 - a * (x1 - xv) ** 2
            if abs(yv) < threshold and x0 < xv < x2:
                zeros.append(xv)

    zeros = sorted(float(z) for z in zeros)
    merged = []
    for z in zeros:
        if not merged or z - merged[-1] > 1e-9:
            merged.append(z)
    return merged


def hilbert_real_part(deltas, im_chi, at=None):
    """Real part implied by causality from ``Im chi`` on a uniform grid.

    Principal value of ``(1/pi) int Im chi(x) / (delta - x) dx`` over the
    grid, with the singular part integrated analytically.  ``at`` selects
    grid indices to evaluate (default: all).
    """
    x = np.asarray(deltas, dtype=float)
    f = np.asarray(im_chi, dtype=float)
    dfdx = np.gradient(f, x)
    a, b = x[0], x[-1]
    idx = range(len(x)) if at is None else at
    out = []
    for k in idx:
        xk = x[k]
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (f - f[k]) / (xk - x)
        g[k] = -dfdx[k]
        val = np.trapezoid(g, x) if hasattr(np, "trapezoid") else np.trapz(g, x)
        if a < xk < b:
            val += f[k] * math.log((xk - a) / (b - xk))
        out.append(val / math.pi)
    return np.array(out)
