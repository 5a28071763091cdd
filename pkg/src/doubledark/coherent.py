"""Rotating-frame Hamiltonian, dressed states and unitarily equivalent schemes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import DegenerateSpectrum, UnsupportedDetuning, ValidityViolated
from .model import A, B, C, D, SystemParams

__all__ = [
    "DressedStateSet",
    "build_hamiltonian",
    "dressed_exact",
    "dressed_perturbative",
    "equivalent_scheme",
    "DRESSED_LABELS",
]

DRESSED_LABELS = ("+", "-", "0")
DEGENERACY_TOL = 1e-10
PERTURBATIVE_GUARD = 10.0


def build_hamiltonian(p: SystemParams, delta: float, probe: Optional[float] = None) -> np.ndarray:
    """Hamiltonian over ``(a, c, d, b)`` for probe detuning ``delta`` (hbar = 1).

    ``probe`` overrides ``p.probe``; pass ``0.0`` for the probe-off matrix.
    """
    e = p.probe if probe is None else probe
    h = np.zeros((4, 4), dtype=complex)
    h[A, A] = p.delta0
    h[A, C] = h[C, A] = p.omega
    h[C, D] = h[D, C] = p.omega_c
    h[D, D] = -p.delta_c
    h[A, B] = h[B, A] = e
    h[B, B] = p.delta0 - delta
    return -h


@dataclass
class DressedStateSet:
    """Three dressed levels of the driven ``(a, c, d)`` manifold.

    ``frequencies[k]`` and ``vectors[:, k]`` belong to ``labels[k]``; labels
    run ``("+", "-", "0")`` unless the set is flagged degenerate, in which
    case ``labels`` is ``None`` and frequencies are sorted ascending.
    """

    frequencies: np.ndarray
    vectors: np.ndarray
    kind: str
    labels: Optional[tuple] = DRESSED_LABELS
    flags: list = field(default_factory=list)
    omega0_sq: Optional[float] = None
    omega_tilde_sq: Optional[float] = None

    def frequency(self, label: str) -> float:
        return float(self.frequencies[self.labels.index(label)])

    def vector(self, label: str) -> np.ndarray:
        return self.vectors[:, self.labels.index(label)]


def _bare_pair(p: SystemParams):
    """Autler-Townes frequencies ``(omega_plus, omega_minus)`` of the a-c doublet."""
    root = math.sqrt(p.omega**2 + p.delta0**2 / 4.0)
    return -p.delta0 / 2.0 - root, -p.delta0 / 2.0 + root


def _unperturbed_vectors(p: SystemParams) -> np.ndarray:
    # lower eigenvalue of the a-c block is omega_plus
    block = build_hamiltonian(p, 0.0, probe=0.0)[:2, :2]
    _, vecs = np.linalg.eigh(block)
    start = np.zeros((3, 3), dtype=complex)
    start[:2, :2] = vecs
    start[2, 2] = 1.0
    # phase convention: c-component of |+> and a-component of |-> positive
    for k, row in ((0, 1), (1, 0)):
        ref = start[row, k] if abs(start[row, k]) > 1e-14 else start[1 - row, k]
        start[:, k] *= abs(ref) / ref
    return start


def dressed_exact(p: SystemParams, allow_degenerate: bool = False, steps: int = 64) -> DressedStateSet:
    """Exact eigendecomposition of the probe-off ``(a, c, d)`` block.

    Labels follow the dressed states continuously from ``omega_c = 0`` by
    maximal eigenvector overlap along ``steps`` increments of ``omega_c``.
    """
    h3 = build_hamiltonian(p, 0.0, probe=0.0)[:3, :3]
    w, v = np.linalg.eigh(h3)
    if np.min(np.diff(w)) < DEGENERACY_TOL:
        if not allow_degenerate:
            raise DegenerateSpectrum(f"dressed frequencies coincide: {w}")
        return DressedStateSet(w, v, "exact", labels=None, flags=["degenerate"],
                               omega_tilde_sq=p.omega_tilde_sq)

    flags = []
    current = _unperturbed_vectors(p)
    freqs = None
    for oc in np.linspace(0.0, p.omega_c, steps + 1)[1:] if p.omega_c > 0 else [0.0]:
        h = build_hamiltonian(p.replace(omega_c=float(oc)), 0.0, probe=0.0)[:3, :3]
        w_k, v_k = np.linalg.eigh(h)
        overlap = np.abs(current.conj().T @ v_k) ** 2
        rows, cols = linear_sum_assignment(-overlap)
        if overlap[rows, cols].min() < 0.75 and "ambiguous-labels" not in flags:
            flags.append("ambiguous-labels")
        new = v_k[:, cols]
        phase = np.sum(current.conj() * new, axis=0)
        phase = np.where(np.abs(phase) > 1e-14, phase, 1.0)
        current = new * (np.abs(phase) / phase).conj()
        freqs = w_k[cols]
    return DressedStateSet(np.asarray(freqs, dtype=float), current, "exact", flags=flags,
                           omega_tilde_sq=p.omega_tilde_sq)


def dressed_perturbative(p: SystemParams) -> DressedStateSet:
    """Dressed states to first order in ``omega_c``, in closed form.

    Amplitudes are not renormalized; their norms deviate from one at
    second order in ``omega_c``.
    """
    om, oc = p.omega, p.omega_c
    ot2 = p.omega_tilde_sq
    if abs(ot2) < PERTURBATIVE_GUARD * oc**2:
        raise ValidityViolated(
            f"|Omega_tilde^2| = {abs(ot2):.3g} is below {PERTURBATIVE_GUARD:g} Omega_c^2 = "
            f"{PERTURBATIVE_GUARD * oc**2:.3g}: dressed levels too close for first-order theory"
        )
    w_plus, w_minus = _bare_pair(p)
    w_zero = p.delta_c
    omega0_sq = om**2 + (p.delta0 / 2.0 + math.sqrt(om**2 + p.delta0**2 / 4.0)) ** 2
    if omega0_sq == 0.0:
        raise ValidityViolated("Omega_0 vanishes: no drive and non-positive drive detuning")
    n0 = math.sqrt(omega0_sq)

    def admix(den):
        return 0.0 if oc == 0.0 else oc / den

    vecs = np.zeros((3, 3), dtype=complex)
    vecs[:, 0] = np.array([-w_plus, om, om * admix(w_zero - w_plus)]) / n0
    vecs[:, 1] = np.array([om, w_plus, w_plus * admix(w_zero - w_minus)]) / n0
    if oc == 0.0:
        vecs[:, 2] = [0.0, 0.0, 1.0]
    else:
        vecs[:, 2] = [-oc * om / ot2, oc * (p.delta_c + p.delta0) / ot2, 1.0]
    return DressedStateSet(
        np.array([w_plus, w_minus, w_zero]),
        vecs,
        "perturbative",
        omega0_sq=omega0_sq,
        omega_tilde_sq=ot2,
    )


def equivalent_scheme(p: SystemParams, which: str, delta: float = 0.0):
    """Rewrite the Hamiltonian in a unitarily equivalent basis.

    ``which="lower-doublet"`` replaces ``c, d`` by ``(c +/- d)/sqrt(2)``
    (requires ``delta_c = 0``); ``which="upper-doublet"`` replaces ``a, c``
    by the eigenstates of the drive interaction.  Returns ``(U H U^+, U)``;
    rows of ``U`` are the new basis states in the old basis, in the order
    ``(a, c1, c2, b)`` or ``(a1, a2, d, b)``.
    """
    u = np.eye(4, dtype=complex)
    if which == "lower-doublet":
        if p.delta_c != 0.0:
            raise UnsupportedDetuning(
                f"lower-doublet splitting is exactly +/-Omega_c only for delta_c = 0, got {p.delta_c}"
            )
        s = 1.0 / math.sqrt(2.0)
        u[C, :] = 0.0
        u[D, :] = 0.0
        u[C, C], u[C, D] = s, s
        u[D, C], u[D, D] = s, -s
    elif which == "upper-doublet":
        block = build_hamiltonian(p, 0.0, probe=0.0)[:2, :2]
        _, vecs = np.linalg.eigh(block)
        for k in range(2):
            lead = vecs[0, k] if abs(vecs[0, k]) > 1e-14 else vecs[1, k]
            vecs[:, k] *= abs(lead) / lead
        u[:2, :2] = vecs.conj().T
    else:
        raise ValueError(f"which must be 'lower-doublet' or 'upper-doublet', got {which!r}")
    h = build_hamiltonian(p, delta)
    return u @ h @ u.conj().T, u
