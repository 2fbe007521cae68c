"""Behaviour of transmission eigenfunctions near corners and boundaries.

Square eigenfunctions tend to vanish at the corners, Herglotz approximations
of them need ever larger densities, and high-order disk eigenfunctions
concentrate at the boundary.

Run: python demos/eigenfunction_probes.py
"""
import numpy as np

from telab import (
    DirectionQuadrature,
    Disk,
    GridSpec,
    Medium,
    corner_profile,
    corners,
    density_growth_profile,
    grid_eigenpairs,
    localization_scan,
    unit_square,
)
from telab.probes import running_max

sq = unit_square()
_, pairs = grid_eigenpairs(Medium(sq, 2.0), GridSpec.covering(sq, 1 / 80), (20.0, 100.0), max_modes=5)
print("square, V = 2: corner/interior mean |v| at r = 0.1, 0.05")
for p in pairs:
    r = corner_profile(p.v, corners(sq)[0], [0.1, 0.05], sq).ratio()
    print(f"  k^2 = {p.lam.real:8.3f}: {np.round(r, 3).tolist()}")

_, first = grid_eigenpairs(Medium(sq, 2.0), GridSpec.covering(sq, 1 / 48), (20.0, 100.0), max_modes=1)
prof = density_growth_profile(first[0].v, first[0].k, DirectionQuadrature(64))
print("Herglotz fit of the first eigenfunction (alpha, error, ||g||):")
for a, e, g in prof.table():
    print(f"  {a:7.0e}  {e:.3e}  {g:.3e}")

recs = localization_scan(Medium(Disk((0.0, 0.0), 1.0), 1.0), 40, 0.1)
print("disk, V = 1: share of L2 mass within 0.1 of the boundary")
for r in recs[::8]:
    print(f"  m = {r.m:2d}, k = {r.k:7.3f}: u {r.rho_u:.3f}, v {r.rho_v:.3f}")
print(f"running max at m = 40: {running_max(recs)[-1]:.3f}")
