"""The same atom written in two other bases.

Mixing c and d gives a Lambda system with two lower states split by the
perturbation; diagonalizing the drive gives two upper states.  Both are
unitary rewrites, so the probe response must not change.
"""

import numpy as np

from doubledark import chi_numeric, equivalent_scheme, figure_params

p = figure_params("fig2a")
np.set_printoptions(precision=3, suppress=True)
for which in ("lower-doublet", "upper-doublet"):
    h, u = equivalent_scheme(p, which)
    print(f"{which}: Hamiltonian\n{h.real}")
    diffs = [abs(chi_numeric(p, x, basis=u) - chi_numeric(p, x)) for x in np.linspace(-2, 2, 9)]
    print(f"largest change in chi: {max(diffs):.1e}\n")
