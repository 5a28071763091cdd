"""Model parameters and the relaxation rates derived from them.

All rates, detunings and Rabi frequencies are expressed in units of a single
reference rate (``gamma_bar = 1``).  Levels are ordered ``(a, c, d, b)``:
``a`` is the excited state, ``b`` the probe ground state, ``c`` the lower
state of the drive transition and ``d`` the extra metastable state reached by
the coherent perturbation.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import (
    DegenerateDynamicsWarning,
    FluxImbalance,
    NegativeRate,
    NonPositiveProbe,
    ParameterError,
)

__all__ = [
    "A", "C", "D", "B", "LEVELS",
    "SystemParams", "RateSet", "ScanGrid",
    "validate_params", "derived_rates", "figure_params",
]

# basis indices
A, C, D, B = 0, 1, 2, 3
LEVELS = ("a", "c", "d", "b")

FLUX_TOL = 1e-12

_RATE_FIELDS = (
    "omega", "omega_c", "gamma_b", "gamma_c", "gamma_d",
    "gamma_0", "r_pump", "r_b", "r_c", "r_d",
)
PUMP_LEVELS = ("a", "d")


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the four-level system.

    ``r_b``, ``r_c`` and ``r_d`` are the transit refill rates into ``b``,
    ``c`` and ``d``; left as ``None`` each defaults to ``gamma_0 / 3``.

    ``pump_level`` selects where the incoherent pump ``r_pump`` takes atoms
    from ``b``: ``"a"`` (excitation of the upper level, which then decays
    into ``d``) or ``"d"`` (direct transfer into ``d``).
    """

    omega: float = 1.0
    omega_c: float = 0.0
    probe: float = 1e-4
    delta0: float = 0.0
    delta_c: float = 0.0
    gamma_b: float = 1.0
    gamma_c: float = 1.0
    gamma_d: float = 1.0
    gamma_0: float = 0.0
    r_pump: float = 0.0
    r_b: Optional[float] = None
    r_c: Optional[float] = None
    r_d: Optional[float] = None
    eta: float = 1.0
    pump_level: str = "a"

    def __post_init__(self):
        violations = []
        first = None

        def fail(kind, msg):
            nonlocal first
            violations.append(msg)
            if first is None:
                first = kind

        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "pump_level" or v is None:
                continue
            if not isinstance(v, (int, float, np.floating, np.integer)) or isinstance(v, bool):
                fail(ParameterError, f"{f.name} must be a real number, got {v!r}")
            elif not math.isfinite(v):
                fail(ParameterError, f"{f.name} must be finite, got {v!r}")
        if violations:
            raise first("; ".join(violations), violations)

        for name in _RATE_FIELDS:
            v = getattr(self, name)
            if v is not None and v < 0:
                fail(NegativeRate, f"{name} must be >= 0, got {v}")
        if not self.probe > 0:
            fail(NonPositiveProbe, f"probe must be > 0, got {self.probe}")
        if not self.eta > 0:
            fail(ParameterError, f"eta must be > 0, got {self.eta}")
        if self.pump_level not in PUMP_LEVELS:
            fail(ParameterError, f"pump_level must be one of {PUMP_LEVELS}, got {self.pump_level!r}")
        if not violations:
            inflow = sum(self.injection_rates)
            if abs(inflow - self.gamma_0) > FLUX_TOL:
                fail(
                    FluxImbalance,
                    f"r_b + r_c + r_d = {inflow!r} does not balance gamma_0 = {self.gamma_0!r}",
                )
        if violations:
            raise first("; ".join(violations), violations)

    @property
    def injection_rates(self) -> tuple[float, float, float]:
        """Transit refill rates ``(r_b, r_c, r_d)`` with defaults resolved."""
        third = self.gamma_0 / 3.0
        return tuple(third if v is None else float(v) for v in (self.r_b, self.r_c, self.r_d))

    @property
    def gamma_a(self) -> float:
        return self.gamma_b + self.gamma_c + self.gamma_d

    @property
    def omega_tilde_sq(self) -> float:
        """Detuned drive strength ``Omega^2 - Delta_c (Delta_c + Delta_0)``.

        Vanishes where the perturbed dressed level crosses an Autler-Townes
        component.
        """
        return self.omega**2 - self.delta_c * (self.delta_c + self.delta0)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class RateSet:
    gamma_a: float
    gamma_ab: float
    gamma_cb: float
    gamma_db: float


@dataclass(frozen=True)
class ScanGrid:
    """Uniform detuning grid, endpoints inclusive."""

    delta_min: float
    delta_max: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.delta_min) and math.isfinite(self.delta_max)):
            raise ParameterError("scan limits must be finite")
        if not self.delta_min < self.delta_max:
            raise ParameterError(
                f"delta_min ({self.delta_min}) must be below delta_max ({self.delta_max})"
            )
        if isinstance(self.points, bool) or int(self.points) != self.points or self.points < 2:
            raise ParameterError(f"points must be an integer >= 2, got {self.points!r}")

    @property
    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, int(self.points))


def validate_params(raw: Mapping) -> SystemParams:
    """Build :class:`SystemParams` from a flat mapping (e.g. parsed JSON).

    Raises a :class:`ParameterError` subclass whose ``violations`` attribute
    lists every problem found.  Warns with :class:`DegenerateDynamicsWarning`
    when no relaxation channel is active.
    """
    names = {f.name for f in dataclasses.fields(SystemParams)}
    unknown = sorted(set(raw) - names)
    if unknown:
        raise ParameterError(f"unknown parameter(s): {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if key == "pump_level" or value is None:
            kwargs[key] = value
            continue
        try:
            kwargs[key] = float(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{key} is not a real number: {value!r}") from None
    p = SystemParams(**kwargs)
    if p.gamma_a == 0 and p.gamma_0 == 0 and p.r_pump == 0:
        warnings.warn(
            "all relaxation rates vanish; steady states need not be unique",
            DegenerateDynamicsWarning,
            stacklevel=2,
        )
    return p


def derived_rates(p: SystemParams) -> RateSet:
    """Coherence relaxation rates as half-sums of level removal rates.

    Removal rates: ``a`` loses ``gamma_a + gamma_0``, ``b`` loses
    ``gamma_0 + r_pump``, ``c`` and ``d`` lose ``gamma_0``.
    """
    gamma_a = p.gamma_a
    out_a = gamma_a + p.gamma_0
    out_b = p.gamma_0 + p.r_pump
    out_cd = p.gamma_0
    return RateSet(
        gamma_a=gamma_a,
        gamma_ab=0.5 * (out_a + out_b),
        gamma_cb=0.5 * (out_cd + out_b),
        gamma_db=0.5 * (out_cd + out_b),
    )


_FIGURES = {
    "fig2a": dict(omega=1.0, omega_c=0.2, delta0=0.0, delta_c=0.0),
    "fig2b": dict(omega=1.0, omega_c=0.2, delta0=0.0, delta_c=1.0),
    "fig3a": dict(omega=1.0, omega_c=0.01, delta0=0.0, delta_c=0.0, gamma_0=1e-4, r_pump=1e-3),
    "fig3b": dict(omega=1.0, omega_c=0.01, delta0=0.0, delta_c=0.4, gamma_0=1e-4, r_pump=5e-4),
}


def figure_params(name: str, **overrides) -> SystemParams:
    """Reference parameter sets: ``fig2a``, ``fig2b``, ``fig3a``, ``fig3b``.

    All use ``gamma_b = gamma_c = gamma_d = 1``; the ``fig3`` sets refill
    transit losses equally into ``b``, ``c`` and ``d``.
    """
    try:
        base = dict(_FIGURES[name])
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(_FIGURES)}") from None
    base.update(overrides)
    return SystemParams(**base)
