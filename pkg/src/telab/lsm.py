"""Linear sampling method.

For every sampling point ``z`` the far-field equation ``F g = Phi_inf(., z)``
is solved with Tikhonov regularisation and ``||g_z||`` is used as an indicator
of the scatterer support.  Sweeping ``k`` and averaging the indicator over
interior probes exposes transmission eigenvalues as peaks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.signal import find_peaks

from . import specialfn as sf
from .errors import CutoffError, DegenerateMediumError, ParameterError, ShapeError
from .geometry import GridSpec
from .herglotz import FarFieldMatrix, HerglotzDensity, assemble_far_field_matrix

DEFAULT_REL_EPS = 1e-3
# eigenvalue scans need a much weaker filter: at |lambda|^2 ~ eps the Tikhonov
# factor |lambda|/(eps+|lambda|^2) splits the peak into two shoulders
SCAN_REL_EPS = 1e-5


@dataclass(frozen=True)
class SamplingMesh:
    """Rectangular lattice of sampling points; arrays are ``(nx, ny)``."""

    grid: GridSpec

    @classmethod
    def from_bounds(cls, xlim, ylim, spacing):
        nx = int(round((xlim[1] - xlim[0]) / spacing)) + 1
        ny = int(round((ylim[1] - ylim[0]) / spacing)) + 1
        if nx < 1 or ny < 1:
            raise ParameterError("sampling mesh is empty")
        return cls(GridSpec((xlim[0], ylim[0]), spacing, nx, ny))

    @property
    def shape(self):
        return self.grid.shape

    def points(self):
        return self.grid.points()


@dataclass
class LSMResult:
    k: float
    eps: float
    mesh: SamplingMesh
    indicator: np.ndarray
    cutoff: float | None = None
    classification: np.ndarray | None = None
    info: dict = field(default_factory=dict)


def phi_infty_rhs(z, k, quad):
    """``gamma_2 exp(-i k xhat_i . z)``; ``z`` of shape ``(2,)`` or ``(m, 2)``."""
    k = sf.check_wavenumber(k)
    z = np.asarray(z, dtype=float)
    return sf.far_field_constant(k) * np.exp(-1j * k * (z @ quad.directions.T))


def default_eps(F, rel=DEFAULT_REL_EPS):
    """``rel * sigma_1^2`` with ``sigma_1`` the top singular value of ``W^{1/2} F``."""
    s1 = np.linalg.norm(F.entries, 2) * math.sqrt(F.quadrature.weight)
    return rel * s1**2


class TikhonovSolver:
    """Factorisation of ``eps I + F^* W F`` reused over right-hand sides.

    ``W`` is the quadrature weight ``2 pi / N`` unless ``weight`` overrides it.
    """

    def __init__(self, F, eps, weight=None):
        if not eps > 0:
            raise ParameterError(f"regularisation must be positive, got {eps}")
        self.F = F
        self.eps = float(eps)
        w = F.quadrature.weight if weight is None else float(weight)
        A = F.entries
        self.FhW = w * A.conj().T
        N = self.eps * np.eye(F.quadrature.n) + self.FhW @ A
        self._chol = sla.cho_factor(N)

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=complex)
        n = self.F.quadrature.n
        if rhs.shape[-1] != n:
            raise ShapeError(f"right-hand side has {rhs.shape[-1]} entries, expected {n}")
        g = sla.cho_solve(self._chol, self.FhW @ rhs.reshape(-1, n).T).T
        return g.reshape(rhs.shape)

    def normal_residual(self, g, rhs):
        A = self.F.entries
        lhs = self.eps * g + self.FhW @ (A @ g)
        b = self.FhW @ rhs
        return float(np.linalg.norm(lhs - b) / max(np.linalg.norm(b), 1e-300))


def tikhonov_solve(F, rhs, eps, weight=None):
    """``g = (eps I + F^* W F)^{-1} F^* W rhs`` with quadrature weights ``W``."""
    g = TikhonovSolver(F, eps, weight).solve(rhs)
    return HerglotzDensity(F.quadrature, g)


def indicator_map(F, mesh, eps=None):
    """``I(z) = ||g_z^eps||_{L^2(S^1)}`` on every mesh point."""
    if eps is None:
        eps = default_eps(F)
    ts = TikhonovSolver(F, eps)
    pts = mesh.points().reshape(-1, 2)
    G = ts.solve(phi_infty_rhs(pts, F.k, F.quadrature))
    ind = F.quadrature.norm(G).reshape(mesh.shape)
    return LSMResult(F.k, float(eps), mesh, ind)


def otsu_threshold(values, nbins=256):
    """Two-class threshold maximising the between-class variance."""
    v = np.asarray(values, dtype=float).ravel()
    lo, hi = v.min(), v.max()
    if not hi > lo:
        raise CutoffError("indicator is constant; no automatic cut-off exists")
    hist, edges = np.histogram(v, bins=nbins, range=(lo, hi))
    p = hist / hist.sum()
    mid = 0.5 * (edges[1:] + edges[:-1])
    w0 = np.cumsum(p)
    mu = np.cumsum(p * mid)
    mu_t = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mu_t * w0 - mu) ** 2 / (w0 * (1 - w0))
    between[~np.isfinite(between)] = -1
    i = int(np.argmax(between))
    return float(edges[i + 1])


def classify(result, cutoff="auto"):
    """Mark ``z`` as inside when ``I(z) <= c0``; ``auto`` thresholds ``log I``."""
    ind = result.indicator
    if cutoff == "auto":
        if np.any(ind <= 0):
            raise CutoffError("indicator has non-positive values; log threshold undefined")
        c0 = float(np.exp(otsu_threshold(np.log(ind))))
    else:
        c0 = float(cutoff)
    result.cutoff = c0
    result.classification = ind <= c0
    return result.classification


def jaccard(a, b):
    a = np.asarray(a, bool)
    b = np.asarray(b, bool)
    union = np.logical_or(a, b).sum()
    return float(np.logical_and(a, b).sum() / union) if union else 1.0


@dataclass
class TEScanResult:
    ks: np.ndarray
    curve: np.ndarray
    peaks: list
    prominences: list
    threshold: float


def _refine_peak(ks, curve, i):
    if i == 0 or i == len(ks) - 1:
        return float(ks[i])
    y0, y1, y2 = curve[i - 1], curve[i], curve[i + 1]
    den = y0 - 2 * y1 + y2
    if den >= 0:
        return float(ks[i])
    step = ks[i + 1] - ks[i]
    return float(ks[i] + 0.5 * step * (y0 - y2) / den)


def te_scan(med, k_range, step, probes, spec, quad=None, rel_eps=SCAN_REL_EPS, prominence_factor=3.0):
    """Transmission eigenvalues from the failure of the sampling method.

    At each ``k`` the far-field matrix is rebuilt and ``||g_z||`` averaged over
    the interior ``probes``.  Local maxima whose prominence exceeds
    ``prominence_factor`` times the median level are reported, refined by a
    three-point parabola.
    """
    from .directions import DirectionQuadrature

    if not 0 < step <= 0.02:
        raise ParameterError(f"k step must be in (0, 0.02], got {step}")
    if med.is_trivial(spec):
        raise DegenerateMediumError("zero contrast: every wavenumber is degenerate")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if np.any(med.domain.signed_distance(probes) >= 0):
        raise ParameterError("sampling probes must lie strictly inside the scatterer")
    quad = quad or DirectionQuadrature(64)
    k_min, k_max = k_range
    ks = k_min + step * np.arange(int(math.floor((k_max - k_min) / step + 1e-9)) + 1)
    curve = np.empty(len(ks))
    for i, k in enumerate(ks):
        F = assemble_far_field_matrix(med, k, quad, spec)
        ts = TikhonovSolver(F, default_eps(F, rel_eps))
        g = ts.solve(phi_infty_rhs(probes, k, quad))
        curve[i] = quad.norm(g).mean()
    thr = prominence_factor * float(np.median(curve))
    idx, props = find_peaks(curve, prominence=thr)
    peaks = [_refine_peak(ks, curve, i) for i in idx]
    return TEScanResult(ks, curve, peaks, list(props["prominences"]), thr)
