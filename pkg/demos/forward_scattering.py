"""Scattering by a penetrable disk: the volume integral solver against the Mie series.

Run: python demos/forward_scattering.py
"""
import numpy as np

from telab import Disk, GridSpec, Medium, PlaneWave, ScatteringSolver, mie_disk

disk = Disk((0.0, 0.0), 1.0)
med = Medium(disk, 1.0)
k = 2.0
mie = mie_disk(1.0, 1.0, k)
angles = 2 * np.pi * np.arange(64) / 64

print("h       unknowns  near-field err  far-field err")
for h in (0.1, 0.05, 0.025):
    spec = GridSpec.covering(disk, h)
    S = ScatteringSolver(med, k, spec)
    res = S.solve(PlaneWave((1.0, 0.0)))
    ref = mie.scattered(spec.points())
    near = np.linalg.norm(res.scattered.values - ref) / np.linalg.norm(ref)
    ff = S.far_field_unknowns(res.total.values[S.ix, S.iy], angles)
    far = np.linalg.norm(ff - mie.far_field(angles)) / np.linalg.norm(mie.far_field(angles))
    print(f"{h:<7} {S.n:<9} {near:<15.4f} {far:.4f}")

# energy balance of the exact solution: total scattered power equals the forward-amplitude loss
t = 2 * np.pi * np.arange(2048) / 2048
power = np.sum(np.abs(mie.far_field(t)) ** 2) * 2 * np.pi / 2048
fwd = -np.sqrt(8 * np.pi / k) * (np.exp(0.25j * np.pi) * mie.far_field(np.array([0.0]))[0]).real
print(f"optical theorem: {power:.6f} vs {fwd:.6f}")
