"""Discrete far-field operator and Herglotz-wave fitting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .directions import DirectionQuadrature, HerglotzDensity, herglotz_eval, herglotz_matrix
from .errors import DomainError, ParameterError, ShapeError, SolverError
from .forward import ScatteringSolver
from . import specialfn as sf

__all__ = [
    "DirectionQuadrature",
    "HerglotzDensity",
    "FarFieldMatrix",
    "assemble_far_field_matrix",
    "apply_F",
    "herglotz_eval",
    "herglotz_fit",
    "FitReport",
    "density_growth_profile",
    "GrowthProfile",
    "DEFAULT_ALPHAS",
]

DEFAULT_ALPHAS = tuple(10.0 ** -p for p in range(2, 9))


@dataclass
class FarFieldMatrix:
    """``entries[i, j] = u_inf(xhat_i, d_j)`` on a shared direction quadrature."""

    k: float
    quadrature: DirectionQuadrature
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        n = self.quadrature.n
        if self.entries.shape != (n, n):
            raise ShapeError(f"far-field matrix must be {n}x{n}, got {self.entries.shape}")
        if not np.all(np.isfinite(self.entries)):
            raise ParameterError("far-field entries must be finite")

    def reciprocity_defect(self):
        """``||F - P F^T P|| / ||F||`` with ``P`` the antipodal permutation."""
        P = self.quadrature.antipodal()
        F = self.entries
        nrm = np.linalg.norm(F)
        if nrm == 0:
            return 0.0
        return float(np.linalg.norm(F - F.T[np.ix_(P, P)]) / nrm)

    def circulant_defect(self):
        """Relative spread of ``F[i, j]`` along each diagonal ``i - j = const``."""
        n = self.quadrature.n
        F = self.entries
        i = np.arange(n)
        diags = np.array([F[(i + s) % n, i] for s in range(n)])
        mean = diags.mean(axis=1, keepdims=True)
        nrm = np.linalg.norm(F)
        return 0.0 if nrm == 0 else float(np.linalg.norm(diags - mean) / nrm)

    def with_noise(self, level, rng):
        """Copy with relative complex Gaussian noise ``level * ||F|| / n`` per entry."""
        n = self.quadrature.n
        E = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        E *= level * np.linalg.norm(self.entries) / np.linalg.norm(E)
        return FarFieldMatrix(self.k, self.quadrature, self.entries + E)


def assemble_far_field_matrix(med, k, quad, spec, solver=None):
    """Far fields of all plane waves ``d_j`` at all ``xhat_i``, one factorisation.

    Strict resolution (``k h <= 0.5``) is enforced.  A prebuilt ``solver`` for
    the same medium, wavenumber and grid can be passed to skip assembly.
    """
    if solver is None:
        solver = ScatteringSolver(med, k, spec, strict=True)
    d = quad.directions
    if solver.trivial:
        return FarFieldMatrix(solver.k, quad, np.zeros((quad.n, quad.n), dtype=complex))
    x0, y0 = spec.origin
    y = np.column_stack([x0 + spec.h * solver.ix, y0 + spec.h * solver.iy])
    rhs = np.exp(1j * solver.k * (y @ d.T))
    U = solver.solve_unknowns(rhs)
    bad = ~np.all(np.isfinite(U), axis=0)
    if np.any(bad):
        raise SolverError(f"forward solve produced non-finite values for incident column {int(np.argmax(bad))}")
    F = solver.far_field_unknowns(U, d)
    return FarFieldMatrix(solver.k, quad, F)


def apply_F(F, g):
    """``(F g)_i = sum_j F_ij w_j g_j``."""
    if g.quadrature != F.quadrature:
        raise ShapeError("density and far-field matrix use different quadratures")
    return F.entries @ (F.quadrature.weights * g.g)


@dataclass
class FitReport:
    alpha: float
    error: float
    relative_error: float
    density_norm: float
    objective: float
    normal_residual: float


class _HerglotzFitter:
    """Weighted Tikhonov least squares for Herglotz densities on one target.

    Minimises ``||H g - t||^2_{L2(Omega)} + alpha ||g||^2_{L2(S^1)}`` with the
    grid-node quadrature on ``Omega``.  One SVD serves every ``alpha``.
    """

    def __init__(self, target, k, quad):
        mask = target.mask
        if not np.any(mask):
            raise DomainError("target mask is empty")
        self.k = sf.check_wavenumber(k)
        self.quad = quad
        self.cell = target.spec.cell_area()
        pts = target.spec.points()[mask]
        self.t = target.values[mask]
        if not np.all(np.isfinite(self.t)):
            raise ParameterError("target values must be finite on the mask")
        self.H = herglotz_matrix(self.k, pts, quad)
        w = quad.weight
        # scaled unknown c = sqrt(w) g, scaled operator A = h H / sqrt(w)
        self.A = np.sqrt(self.cell) * self.H / np.sqrt(w)
        self.b = np.sqrt(self.cell) * self.t
        self.U, self.s, self.Vh = np.linalg.svd(self.A, full_matrices=False)
        self.beta = self.U.conj().T @ self.b
        self.tnorm = float(np.linalg.norm(self.b))

    def density(self, alpha):
        if not alpha > 0:
            raise ParameterError(f"regularisation must be positive, got {alpha}")
        c = self.Vh.conj().T @ (self.s / (self.s**2 + alpha) * self.beta)
        return HerglotzDensity(self.quad, c / np.sqrt(self.quad.weight))

    def report(self, alpha, dens):
        c = np.sqrt(self.quad.weight) * dens.g
        r = self.A @ c - self.b
        err = float(np.linalg.norm(r))
        gn = float(np.linalg.norm(c))
        ne = self.A.conj().T @ r + alpha * c
        scale = np.linalg.norm(self.A.conj().T @ self.b)
        return FitReport(
            alpha=float(alpha),
            error=err,
            relative_error=err / self.tnorm if self.tnorm else 0.0,
            density_norm=gn,
            objective=err**2 + alpha * gn**2,
            normal_residual=float(np.linalg.norm(ne) / scale) if scale else 0.0,
        )

    def objective(self, alpha, g):
        c = np.sqrt(self.quad.weight) * g
        return float(np.linalg.norm(self.A @ c - self.b) ** 2 + alpha * np.linalg.norm(c) ** 2)


def herglotz_fit(target, k, quad, alpha):
    """Herglotz density whose wave best matches ``target`` on its mask.

    Returns the density and a :class:`FitReport` with the ``L^2(Omega)``
    misfit and ``||g||_{L^2(S^1)}``.
    """
    fitter = _HerglotzFitter(target, k, quad)
    dens = fitter.density(alpha)
    return dens, fitter.report(alpha, dens)


@dataclass
class GrowthProfile:
    rows: list = field(default_factory=list)

    @property
    def alphas(self):
        return np.array([r.alpha for r in self.rows])

    @property
    def errors(self):
        return np.array([r.error for r in self.rows])

    @property
    def norms(self):
        return np.array([r.density_norm for r in self.rows])

    def error_nonincreasing(self, rtol=1e-9):
        e = self.errors
        return bool(np.all(e[1:] <= e[:-1] * (1 + rtol) + 1e-300))

    def norm_nondecreasing(self, rtol=1e-9):
        g = self.norms
        return bool(np.all(g[1:] >= g[:-1] * (1 - rtol)))

    def norm_strictly_increasing(self):
        g = self.norms
        return bool(np.all(g[1:] > g[:-1]))

    def norm_ratio(self):
        g = self.norms
        return float(g[-1] / g[0]) if g[0] > 0 else (1.0 if g[-1] == 0 else np.inf)

    def table(self):
        return [(r.alpha, r.error, r.density_norm) for r in self.rows]


def density_growth_profile(target, k, quad, alphas=DEFAULT_ALPHAS):
    """Herglotz fits over a strictly decreasing regularisation sweep."""
    alphas = [float(a) for a in alphas]
    if not alphas or any(a <= 0 for a in alphas) or any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ParameterError("alpha sequence must be positive and strictly decreasing")
    fitter = _HerglotzFitter(target, k, quad)
    prof = GrowthProfile()
    for a in alphas:
        prof.rows.append(fitter.report(a, fitter.density(a)))
    return prof
