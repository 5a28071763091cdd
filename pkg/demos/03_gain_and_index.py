"""Gain without inversion and refractive index near the narrow line.

A weak incoherent pump lifts a few atoms out of b.  The narrow line turns
from absorption into gain once the pump exceeds the threshold, with almost
no population in the upper level.
"""

from doubledark import (
    chi_numeric,
    figure_params,
    gain_threshold_analytic,
    gain_threshold_numeric,
    min_absorption,
    probe_response,
)
from doubledark.model import A
from doubledark.response import feature_window

p = figure_params("fig3a")
delta, im_min = min_absorption(p)
_, rho = probe_response(p, delta, return_state=True)
print(f"min Im chi = {im_min:.4f} at delta = {delta:+.1e}; rho_aa = {rho[A, A].real:.2e}")

print("threshold, closed form:", gain_threshold_analytic(p))
print("threshold, numeric    :", gain_threshold_numeric(p, 1e-5, 1e-2))
only_b = p.replace(r_b=1e-4, r_c=0.0, r_d=0.0)
print("numeric, refill into b only:", gain_threshold_numeric(only_b, 1e-5, 1e-2))

q = figure_params("fig3b")
print("\ndetuned perturbation, around the narrow line:")
for x in feature_window(q, span=3, points=13).deltas:
    chi = chi_numeric(q, x, check_linearity=False)
    print(f"  delta={x:.6f}  Re chi={chi.real:+.4f}  Im chi={chi.imag:+.4f}")
