"""Transmission eigenvalues of a disk three ways.

The radial determinant gives them to machine precision, the clamped-plate
quadratic eigenproblem gives them on a grid, and the sampling method sees them
as peaks of the indicator at interior points.

Run: python demos/transmission_eigenvalues.py   (the scan takes about a minute)
"""
import numpy as np

from telab import Disk, GridSpec, Medium, qep_assemble, qep_solve, radial_te_roots, te_scan

disk = Disk((0.0, 0.0), 1.0)
roots = radial_te_roots(6, 1.0, 9.0, 1.0, 1.0)
print("radial roots (order, k):", [(m, round(float(k), 5)) for m, k in roots])
k1 = roots[0][1]

disc = qep_assemble(Medium(disk, 1.0), GridSpec.covering(disk, 0.025))
lams = qep_solve(disc, (0.5 * k1**2, 1.5 * k1**2))
real = sorted(l.real for l, _ in lams if np.isreal(l))
cplx = [l for l, _ in lams if not np.isreal(l)]
print(f"grid eigenvalues k^2 (real): {np.round(real, 3).tolist()}")
print(f"oracle k^2:                  {np.round([k * k for _, k in roots if k * k < 1.5 * k1**2], 3).tolist()}")
print(f"complex eigenvalues in window: {len(cplx)}")

probes = [[0, 0], [0.1, 0], [0, 0.1], [-0.1, 0], [0, -0.1]]
scan = te_scan(Medium(disk, 1.0), (7.25, 7.5), 0.01, probes, GridSpec.covering(disk, 0.03))
print("indicator peaks:", np.round(scan.peaks, 4).tolist(), "oracle", round(k1, 4))
