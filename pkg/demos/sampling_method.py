"""Imaging a disk from far-field data with the linear sampling method.

Builds the far-field matrix for 64 incident directions, evaluates the sampling
indicator on a mesh around the scatterer and thresholds it.

Run: python demos/sampling_method.py
"""
import numpy as np

from telab import DirectionQuadrature, Disk, GridSpec, Medium, SamplingMesh, assemble_far_field_matrix, classify, indicator_map
from telab.lsm import jaccard

disk = Disk((0.0, 0.0), 1.0)
F = assemble_far_field_matrix(Medium(disk, 1.0), 2.0, DirectionQuadrature(64), GridSpec.covering(disk, 0.05))
print(f"reciprocity defect {F.reciprocity_defect():.2e}, circulant defect {F.circulant_defect():.2e}")

for noise in (0.0, 0.01, 0.05):
    Fn = F.with_noise(noise, np.random.default_rng(1)) if noise else F
    res = indicator_map(Fn, SamplingMesh.from_bounds((-2, 2), (-2, 2), 0.05))
    P = res.mesh.points()
    truth = np.hypot(P[..., 0], P[..., 1]) < 1
    mask = classify(res)
    print(f"noise {noise:4.2f}: Jaccard {jaccard(mask, truth):.3f}, cutoff {res.cutoff:.3g}")

# coarse picture of the reconstruction
res = indicator_map(F, SamplingMesh.from_bounds((-2, 2), (-2, 2), 0.2))
mask = classify(res)
for j in range(mask.shape[1] - 1, -1, -1):
    print("".join("#" if mask[i, j] else "." for i in range(mask.shape[0])))
