"""Double-dark resonances in a driven four-level atom.

Weak-probe susceptibility of a Lambda system whose dark state is coherently
coupled to a fourth metastable level, computed both in closed form and from
the steady state of the full master equation.
"""

from .coherent import (
    DressedStateSet,
    build_hamiltonian,
    dressed_exact,
    dressed_perturbative,
    equivalent_scheme,
)
from .dynamics import (
    Liouvillian,
    build_liouvillian,
    density_matrix_defects,
    evolve,
    probe_response,
    steady_state,
)
from .exceptions import *  # noqa: F401,F403
from .model import RateSet, ScanGrid, SystemParams, derived_rates, figure_params, validate_params
from .response import (
    ScanResult,
    SpectralFeature,
    SusceptibilitySample,
    chi_analytic,
    chi_numeric,
    dip_width,
    find_zeros,
    fit_lorentzian,
    gain_threshold_analytic,
    gain_threshold_numeric,
    interference_feature,
    intersection_width,
    min_absorption,
    scan,
    transparency_points,
)

__version__ = "0.1.0"
