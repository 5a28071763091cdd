"""Dressed levels of the driven a-c-d manifold.

The first-order expressions hold while the perturbed level stays away from
the Autler-Townes pair; near a crossing the exact eigenvectors mix strongly.
"""

import numpy as np

from doubledark import SystemParams, ValidityViolated, dressed_exact, dressed_perturbative

for delta_c in (0.0, 0.5, 0.9, 0.99, 1.0):
    p = SystemParams(omega=1.0, omega_c=0.05, delta_c=delta_c)
    exact = dressed_exact(p)
    line = f"delta_c={delta_c:4.2f}  exact " + " ".join(
        f"{lab}:{exact.frequency(lab):+.5f}" for lab in exact.labels
    )
    try:
        pert = dressed_perturbative(p)
        err = np.max(np.abs(pert.frequencies - exact.frequencies))
        line += f"  first-order error {err:.1e}"
    except ValidityViolated:
        line += "  first-order theory not valid here"
    if exact.flags:
        line += f"  {exact.flags}"
    print(line)

# weight of |d> in each exact state as the crossing is approached
p = SystemParams(omega=1.0, omega_c=0.05, delta_c=0.98)
ex = dressed_exact(p)
print("\n|d> weight near the crossing:", {lab: round(float(abs(ex.vector(lab)[2]) ** 2), 3) for lab in ex.labels})
