"""Split transparency and the narrow interference line.

A drive on a-c makes the probe transparent at two-photon resonance.  A
weak second field mixing c with the metastable level d splits that dark
line in two and leaves a narrow absorption line between the halves.
"""

import numpy as np

from doubledark import ScanGrid, figure_params, interference_feature, scan, transparency_points

p = figure_params("fig2a")
print("transparency points:", transparency_points(p))
feat = interference_feature(p)
print(f"narrow line at {feat.center:+.3f}, full width {feat.width:.3f}, height {feat.height:.3f}")

res = scan(p, ScanGrid(-0.6, 0.6, 25), "both")
_, ana = res.arrays("analytic")
xs, num = res.arrays("numeric")
print(f"\n{'delta':>7} {'Im chi (closed)':>16} {'Im chi (master)':>16} {'Re chi':>9}")
for x, a, n in zip(xs, ana, num):
    print(f"{x:7.3f} {a.imag:16.6f} {n.imag:16.6f} {n.real:9.4f}")
print("\nlargest disagreement:", np.max(np.abs(ana - num)))

# tuning the second field onto the upper dressed level moves the dip
q = figure_params("fig2b")
upper, lower = transparency_points(q)
print(f"\nwith delta_c = 1 the dark points sit at {lower:.5f} and {upper:.5f}")
