"""Open-system generator, steady states and the weak-probe coherence.

Density matrices are vectorized row-major (``rho.reshape(-1)``), so that
``vec(X rho Y) = kron(X, Y.T) @ vec(rho)``.  The generator is affine::

    d vec(rho) / dt = L @ vec(rho) + s

where ``s`` holds the transit refill of the lower levels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .coherent import build_hamiltonian
from .exceptions import NonlinearityWarning, NonUniqueSteadyState, SingularSystem
from .model import A, B, C, D, SystemParams

__all__ = [
    "Liouvillian",
    "liouvillian_from_operators",
    "jump_operators",
    "build_liouvillian",
    "steady_state",
    "evolve",
    "probe_coherence",
    "probe_response",
    "density_matrix_defects",
]

NULL_TOL = 1e-10
LINEARITY_TOL = 1e-3
# below this |response| the halving check compares absolute differences
LINEARITY_FLOOR = 1e-6


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    source: np.ndarray
    # uniform loss rate of every level; the trace then relaxes as
    # d tr(rho)/dt = -removal * tr(rho) + tr(source)
    removal: float = 0.0

    @property
    def dim(self) -> int:
        return int(round(math.sqrt(self.matrix.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Time derivative of ``rho`` under the generator."""
        n = self.dim
        return (self.matrix @ np.asarray(rho).reshape(-1) + self.source).reshape(n, n)

    @property
    def is_affine(self) -> bool:
        return bool(np.any(self.source != 0))


def _ket_bra(i: int, j: int) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    m[i, j] = 1.0
    return m


def jump_operators(p: SystemParams) -> list:
    """``(rate, operator)`` pairs for spontaneous decay and the incoherent pump."""
    pump_target = A if p.pump_level == "a" else D
    return [
        (p.gamma_b, _ket_bra(B, A)),
        (p.gamma_c, _ket_bra(C, A)),
        (p.gamma_d, _ket_bra(D, A)),
        (p.r_pump, _ket_bra(pump_target, B)),
    ]


def liouvillian_from_operators(h, jumps, removal=0.0, injection=None) -> Liouvillian:
    """Assemble the generator from a Hamiltonian and Lindblad jump operators.

    ``removal`` is a uniform loss rate from every level; ``injection`` is the
    matrix fed back per unit time (diagonal in the bare basis).
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    eye = np.eye(n)
    mat = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, j in jumps:
        if rate == 0:
            continue
        jdj = j.conj().T @ j
        mat += rate * (np.kron(j, j.conj()) - 0.5 * np.kron(jdj, eye) - 0.5 * np.kron(eye, jdj.T))
    mat -= removal * np.eye(n * n)
    src = np.zeros(n * n, dtype=complex) if injection is None else np.asarray(injection, dtype=complex).reshape(-1)
    return Liouvillian(mat, src, float(removal))


def build_liouvillian(
    p: SystemParams,
    delta: float,
    probe: Optional[float] = None,
    basis: Optional[np.ndarray] = None,
) -> Liouvillian:
    """Generator for probe detuning ``delta``.

    ``basis`` is an optional unitary whose rows are the new basis states; the
    Hamiltonian, every jump operator and the refill are rotated into it.
    """
    h = build_hamiltonian(p, delta, probe=probe)
    r_b, r_c, r_d = p.injection_rates
    inj = np.zeros((4, 4), dtype=complex)
    inj[B, B], inj[C, C], inj[D, D] = r_b, r_c, r_d
    jumps = jump_operators(p)
    if basis is not None:
        u = np.asarray(basis, dtype=complex)
        ud = u.conj().T
        h = u @ h @ ud
        inj = u @ inj @ ud
        jumps = [(rate, u @ j @ ud) for rate, j in jumps]
    return liouvillian_from_operators(h, jumps, removal=p.gamma_0, injection=inj)


def steady_state(L: Liouvillian) -> np.ndarray:
    """Stationary density matrix of the generator.

    Without a source the (one-dimensional) null space is normalized to unit
    trace.  With a source ``L x = -s`` is solved; when every level is lost
    at the same rate the stationary trace is known in advance and replaces
    one population equation, which keeps slow transit losses well
    conditioned.
    """
    n = L.dim
    trace_row = np.eye(n).reshape(-1)
    if L.is_affine:
        if L.removal <= 0:
            sv = scipy.linalg.svdvals(L.matrix)
            if sv[-1] < NULL_TOL * sv[0]:
                raise SingularSystem(f"generator is rank deficient (smallest singular value {sv[-1]:.3g})")
            return np.linalg.solve(L.matrix, -L.source).reshape(n, n)
        target = (trace_row @ L.source).real / L.removal
    else:
        sv = scipy.linalg.svdvals(L.matrix)
        nullity = int((sv < NULL_TOL * sv[0]).sum())
        if nullity > 1:
            raise NonUniqueSteadyState(f"{nullity} independent stationary states")
        target = 1.0
    # populations are linearly dependent once the trace is fixed: swap the
    # a-a equation for the trace condition
    scale = np.linalg.norm(L.matrix, ord=np.inf)
    mat = L.matrix.copy()
    rhs = -L.source.astype(complex)
    mat[0] = scale * trace_row
    rhs[0] = scale * target
    sv = scipy.linalg.svdvals(mat)
    if sv[-1] < NULL_TOL * sv[0]:
        if L.is_affine:
            raise SingularSystem(f"stationary state not determined (smallest singular value {sv[-1]:.3g})")
        _, _, vh = np.linalg.svd(L.matrix)
        x = vh[-1].conj()
        return (x / np.dot(trace_row, x)).reshape(n, n)
    return np.linalg.solve(mat, rhs).reshape(n, n)


def evolve(L: Liouvillian, rho0: np.ndarray, t: float) -> np.ndarray:
    """Propagate ``rho0`` for a time ``t`` with the exact affine propagator."""
    if not (math.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and non-negative, got {t}")
    m = L.matrix.shape[0]
    aug = np.zeros((m + 1, m + 1), dtype=complex)
    aug[:m, :m] = L.matrix
    aug[:m, m] = L.source
    state = np.append(np.asarray(rho0, dtype=complex).reshape(-1), 1.0)
    out = scipy.linalg.expm(aug * t) @ state
    n = L.dim
    return out[:m].reshape(n, n)


def probe_coherence(rho: np.ndarray, basis: Optional[np.ndarray] = None) -> complex:
    """``<b| rho |a>`` evaluated in whichever basis ``rho`` is expressed."""
    obs = _ket_bra(A, B)
    if basis is not None:
        u = np.asarray(basis, dtype=complex)
        obs = u @ obs @ u.conj().T
    return complex(np.trace(rho @ obs))


def _response_at(p, delta, probe, basis):
    rho = steady_state(build_liouvillian(p, delta, probe=probe, basis=basis))
    # i rho_ba / E reduces to 1 / (gamma_ab + i delta) for a bare two-level atom
    return 1j * probe_coherence(rho, basis) / probe, rho


def probe_response(
    p: SystemParams,
    delta: float,
    basis: Optional[np.ndarray] = None,
    check_linearity: bool = True,
    return_state: bool = False,
):
    """Probe coherence per unit probe field, phased so that ``chi = i eta * response``.

    A second solve at half the probe strength guards the weak-probe
    assumption; a relative change above ``1e-3`` raises a
    :class:`NonlinearityWarning`.
    """
    value, rho = _response_at(p, delta, p.probe, basis)
    if check_linearity:
        half, _ = _response_at(p, delta, 0.5 * p.probe, basis)
        change = abs(value - half) / max(abs(value), LINEARITY_FLOOR)
        if change > LINEARITY_TOL:
            warnings.warn(
                f"probe response at delta={delta:g} changed by {change:.2e} when halving the probe",
                NonlinearityWarning,
                stacklevel=2,
            )
    if return_state:
        return value, rho
    return value


def density_matrix_defects(rho: np.ndarray) -> dict:
    """Deviations from a physical state: Hermiticity, trace and positivity."""
    rho = np.asarray(rho)
    herm = rho - rho.conj().T
    return {
        "hermiticity": float(np.max(np.abs(herm))),
        "trace": float(abs(np.trace(rho) - 1.0)),
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))),
    }
