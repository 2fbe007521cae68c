"""Forward scattering by a penetrable medium.

The Helmholtz system ``Delta u + k^2 (1 + V) u = 0`` with a radiating
scattered field is solved through the Lippmann-Schwinger equation

    u(x) = u^i(x) + k^2 * integral Phi(x, y) V(y) u(y) dy,

discretised by node collocation on the grid nodes inside the scatterer.
Off-diagonal entries use the midpoint rule; the singular self-cell integral is
replaced by the analytic integral of ``Phi`` over the disk of equal area.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.signal import fftconvolve
from scipy.sparse.linalg import LinearOperator, gmres

from . import specialfn as sf
from .directions import DirectionQuadrature, HerglotzDensity, herglotz_eval
from .errors import (
    ConvergenceError,
    DegenerateOrderError,
    ParameterError,
    PlacementError,
    ResolutionError,
    ResolutionWarning,
    SolverError,
)
from .geometry import Disk, GridSpec, rasterize

#: Largest k*h accepted in strict mode (about 12 points per wavelength).
MAX_KH = 0.5
#: Reciprocal condition number below which the system is reported singular.
MIN_RCOND = 1e-13


@dataclass
class Medium:
    """Scatterer ``(Omega, V)`` with contrast ``V = eta^2 - 1`` supported in ``Omega``.

    ``contrast`` is a constant, a callable of the distance to the domain
    centroid (radial profile) or an array of grid samples.
    """

    domain: object
    contrast: float | Callable | np.ndarray = 0.0

    def __post_init__(self):
        c = self.contrast
        if np.isscalar(c):
            if np.iscomplexobj(c) or not np.isfinite(c):
                raise ParameterError("contrast must be real and finite")
            if not 1.0 + c > 0:
                raise ParameterError(f"need 1 + V > 0, got V = {c}")
            self.contrast = float(c)

    @property
    def is_constant(self):
        return np.isscalar(self.contrast)

    def sample(self, spec, mask=None):
        """Contrast on the grid, zero outside the domain."""
        if mask is None:
            mask = rasterize(self.domain, spec).mask
        c = self.contrast
        if np.isscalar(c):
            V = np.where(mask, c, 0.0)
        elif callable(c):
            pts = spec.points()
            r = np.linalg.norm(pts - self.domain.centroid(), axis=-1)
            V = np.where(mask, np.asarray(c(r), dtype=float), 0.0)
        else:
            arr = np.asarray(c)
            if arr.shape != spec.shape:
                raise ParameterError(f"contrast samples have shape {arr.shape}, grid is {spec.shape}")
            if np.iscomplexobj(arr):
                raise ParameterError("contrast must be real")
            V = np.where(mask, arr.astype(float), 0.0)
        if not np.all(np.isfinite(V)):
            raise ParameterError("contrast must be finite")
        if np.any(1.0 + V <= 0):
            raise ParameterError("need 1 + V > 0 everywhere")
        return V

    def is_trivial(self, spec=None):
        if np.isscalar(self.contrast):
            return self.contrast == 0.0
        return not np.any(self.sample(spec))


@dataclass
class ComplexField2D:
    spec: GridSpec
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.shape != self.spec.shape or self.mask.shape != self.spec.shape:
            raise ParameterError("field and mask must match the grid shape")

    def l2_norm(self, mask=None):
        """Grid-quadrature ``L^2`` norm over ``mask`` (default: the field's own mask)."""
        m = self.mask if mask is None else mask
        vals = self.values[m]
        vals = vals[np.isfinite(vals)]
        return float(np.sqrt(self.spec.cell_area() * (np.abs(vals) ** 2).sum()))

    def __add__(self, other):
        return ComplexField2D(self.spec, self.values + other.values, self.mask)

    def __sub__(self, other):
        return ComplexField2D(self.spec, self.values - other.values, self.mask)

    def __mul__(self, a):
        return ComplexField2D(self.spec, self.values * a, self.mask)

    __rmul__ = __mul__


# -- incident fields ---------------------------------------------------------


@dataclass(frozen=True)
class PlaneWave:
    direction: tuple

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (2,) or abs(np.hypot(*d) - 1.0) > 1e-12:
            raise ParameterError("plane-wave direction must be a unit 2-vector")
        object.__setattr__(self, "direction", (float(d[0]), float(d[1])))

    @classmethod
    def from_angle(cls, theta):
        return cls((math.cos(theta), math.sin(theta)))

    def __call__(self, k, points):
        pts = np.asarray(points, dtype=float)
        return np.exp(1j * k * (pts[..., 0] * self.direction[0] + pts[..., 1] * self.direction[1]))


@dataclass(frozen=True)
class PointSource:
    source: tuple

    def __call__(self, k, points):
        return sf.fundamental_solution(k, points, np.asarray(self.source, dtype=float))

    def check_placement(self, domain):
        if domain.signed_distance(np.asarray(self.source, dtype=float)) <= 0:
            raise PlacementError(f"point source {self.source} lies inside the scatterer")


@dataclass(frozen=True)
class HerglotzIncident:
    density: HerglotzDensity

    def __call__(self, k, points):
        return herglotz_eval(self.density, k, points)


def incident_eval(inc, k, spec, domain=None):
    """Sample an incident field on the grid nodes."""
    k = sf.check_wavenumber(k)
    mask = np.zeros(spec.shape, dtype=bool) if domain is None else rasterize(domain, spec).mask
    if isinstance(inc, PointSource) and domain is not None:
        inc.check_placement(domain)
    return ComplexField2D(spec, inc(k, spec.points()), mask)


# -- Lippmann-Schwinger solver ---------------------------------------------


def offset_kernel(k, spec):
    """``K[p, q] = h^2 Phi(k h |(p, q)|)`` on all index offsets, self cell corrected.

    Shape ``(2 nx - 1, 2 ny - 1)``; offset ``(0, 0)`` sits at ``(nx - 1, ny - 1)``.
    """
    h = spec.h
    p = np.arange(-(spec.nx - 1), spec.nx)
    q = np.arange(-(spec.ny - 1), spec.ny)
    r = h * np.hypot(p[:, None], q[None, :])
    r[spec.nx - 1, spec.ny - 1] = 1.0
    K = 0.25j * sf.special.hankel1(0, k * r) * h * h
    K[spec.nx - 1, spec.ny - 1] = sf.disk_average_phi(k, h / math.sqrt(math.pi))
    return K


@dataclass
class ScatteringResult:
    total: ComplexField2D
    scattered: ComplexField2D
    incident: ComplexField2D
    residual: float


class ScatteringSolver:
    """Discrete Lippmann-Schwinger operator for one medium, wavenumber and grid.

    The system matrix is factorised once; any number of incident fields can
    then be solved for.  Above ``dense_limit`` unknowns the matrix is never
    stored and GMRES is used instead.
    """

    def __init__(self, medium, k, spec, strict=False, dense_limit=12000, tol=1e-8, maxiter=2000):
        self.k = sf.check_wavenumber(k)
        self.medium = medium
        self.spec = spec
        kh = self.k * spec.h
        if kh > MAX_KH:
            msg = f"k*h = {kh:.3g} exceeds {MAX_KH}; fewer than ~12 points per wavelength"
            if strict:
                raise ResolutionError(msg)
            warnings.warn(msg, ResolutionWarning, stacklevel=2)
        raster = rasterize(medium.domain, spec)
        self.mask = raster.mask
        self.V = medium.sample(spec, self.mask)
        self.ix, self.iy = np.nonzero(self.mask)
        self.Vu = self.V[self.ix, self.iy]
        self.n = len(self.ix)
        self.trivial = not np.any(self.Vu)
        self.tol = tol
        self.maxiter = maxiter
        self.dense = self.n <= dense_limit
        self._lu = None
        self.rcond = 1.0
        if self.trivial:
            return
        self.K = offset_kernel(self.k, spec)
        if self.dense:
            self._factor()

    # matrix rows/cols are the mask nodes in C order of (ix, iy)
    def _kernel_block(self, rows, cols):
        nx1, ny1 = self.spec.nx - 1, self.spec.ny - 1
        return self.K[
            self.ix[rows, None] - self.ix[None, cols] + nx1,
            self.iy[rows, None] - self.iy[None, cols] + ny1,
        ]

    def _factor(self):
        n = self.n
        k2 = self.k**2
        A = np.empty((n, n), dtype=complex, order="F")
        rows = np.arange(n)
        step = max(1, min(n, 2_000_000 // max(n, 1)))
        for c0 in range(0, n, step):
            cols = np.arange(c0, min(n, c0 + step))
            A[:, cols] = (-k2) * self._kernel_block(rows, cols) * self.Vu[cols]
        A[rows, rows] += 1.0
        anorm = np.abs(A).sum(axis=0).max()
        lu, piv = sla.lu_factor(A, overwrite_a=True, check_finite=False)
        rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
        self.rcond = float(rcond)
        if info != 0 or not np.isfinite(rcond) or rcond < MIN_RCOND:
            raise SolverError(
                f"Lippmann-Schwinger system is singular or ill-conditioned (rcond = {rcond:.3g})",
                condition=1.0 / rcond if rcond > 0 else np.inf,
            )
        self._lu = (lu, piv)

    def apply(self, u):
        """Apply ``I - k^2 G V`` to unknown vectors (columns of ``u``)."""
        s = self.Vu[:, None] * u.reshape(self.n, -1)
        return (u.reshape(self.n, -1) - self.k**2 * self._greens_apply(s)).reshape(u.shape)

    def _greens_apply(self, s):
        out = np.empty_like(s)
        step = max(1, min(self.n, 2_000_000 // max(self.n, 1)))
        cols = np.arange(self.n)
        for r0 in range(0, self.n, step):
            rows = np.arange(r0, min(self.n, r0 + step))
            out[rows] = self._kernel_block(rows, cols) @ s
        return out

    def solve_unknowns(self, rhs):
        """Solve for the total field at the mask nodes; ``rhs`` is ``(n,)`` or ``(n, m)``."""
        rhs = np.asarray(rhs, dtype=complex)
        if self.trivial:
            return rhs.copy()
        if self.dense:
            return sla.lu_solve(self._lu, rhs, check_finite=False)
        cols = rhs.reshape(self.n, -1)
        out = np.empty_like(cols)
        op = LinearOperator((self.n, self.n), matvec=self.apply, dtype=complex)
        for j in range(cols.shape[1]):
            x, info = gmres(op, cols[:, j], rtol=self.tol, atol=0.0, maxiter=self.maxiter, restart=200)
            if info != 0:
                raise ConvergenceError(f"GMRES did not converge for right-hand side {j} (info={info})")
            out[:, j] = x
        return out.reshape(rhs.shape)

    def scattered_on_grid(self, u_unknowns):
        """``k^2 * sum_y Phi(x, y) V(y) u(y) h^2`` at every grid node."""
        spec = self.spec
        src = np.zeros(spec.shape, dtype=complex)
        if self.trivial:
            return src
        src[self.ix, self.iy] = self.Vu * u_unknowns
        full = fftconvolve(src, self.K, mode="full")
        return self.k**2 * full[spec.nx - 1 : 2 * spec.nx - 1, spec.ny - 1 : 2 * spec.ny - 1]

    def solve(self, inc):
        """Total, scattered and incident fields for an incident field descriptor."""
        if isinstance(inc, PointSource):
            inc.check_placement(self.medium.domain)
        pts = self.spec.points()
        ui = inc(self.k, pts)
        u_in = self.solve_unknowns(ui[self.ix, self.iy])
        us = self.scattered_on_grid(u_in)
        u = ui + us
        # interior values straight from the linear solve
        u[self.ix, self.iy] = u_in
        us[self.ix, self.iy] = u_in - ui[self.ix, self.iy]
        if self.trivial:
            us[:] = 0.0
            residual = 0.0
        else:
            r = self.apply(u_in) - ui[self.ix, self.iy]
            residual = float(np.linalg.norm(r) / max(np.linalg.norm(ui[self.ix, self.iy]), 1e-300))
        mk = lambda v: ComplexField2D(self.spec, v, self.mask)
        return ScatteringResult(mk(u), mk(us), mk(ui), residual)

    def far_field_unknowns(self, u_unknowns, directions):
        """Far field ``gamma k^2 h^2 sum_y e^{-ik xhat.y} V(y) u(y)`` from interior values."""
        xh = _directions(directions)
        u = np.asarray(u_unknowns, dtype=complex)
        if self.trivial:
            return np.zeros((len(xh),) + u.shape[1:], dtype=complex)
        x0, y0 = self.spec.origin
        y = np.column_stack([x0 + self.spec.h * self.ix, y0 + self.spec.h * self.iy])
        E = np.exp(-1j * self.k * (xh @ y.T))
        src = self.Vu.reshape((-1,) + (1,) * (u.ndim - 1)) * u
        gamma = sf.far_field_constant(self.k)
        return gamma * self.k**2 * self.spec.cell_area() * (E @ src)


def _directions(directions):
    d = np.asarray(directions, dtype=float)
    if d.ndim == 1:
        d = np.column_stack([np.cos(d), np.sin(d)])
    if d.ndim != 2 or d.shape[1] != 2:
        raise ParameterError("directions must be angles or unit 2-vectors")
    if np.any(np.abs(np.hypot(d[:, 0], d[:, 1]) - 1.0) > 1e-10):
        raise ParameterError("far-field directions must be unit vectors")
    return d


def solve_scattering(med, k, inc, spec, strict=False):
    """Total and scattered fields ``(u, u^s)`` on the grid."""
    res = ScatteringSolver(med, k, spec, strict=strict).solve(inc)
    return res.total, res.scattered


def far_field(med, k, u, directions):
    """Far-field pattern of the field scattered when the total field is ``u``."""
    k = sf.check_wavenumber(k)
    xh = _directions(directions)
    mask = rasterize(med.domain, u.spec).mask
    V = med.sample(u.spec, mask)
    if not np.any(V):
        return np.zeros(len(xh), dtype=complex)
    y = u.spec.points()[mask]
    E = np.exp(-1j * k * (xh @ y.T))
    return sf.far_field_constant(k) * k**2 * u.spec.cell_area() * (E @ (V[mask] * u.values[mask]))


# -- Mie series for a homogeneous disk -----------------------------------------


@dataclass
class MieSolution:
    """Separated-variables solution for a plane wave hitting a constant-contrast disk.

    With ``psi = theta - theta_d`` the fields are
    ``u^s = sum_m i^m a_m H_m(k r) e^{i m psi}`` outside and
    ``u = sum_m i^m b_m J_m(k_1 r) e^{i m psi}`` inside, ``k_1 = k sqrt(1 + V)``.
    """

    radius: float
    contrast: float
    k: float
    theta_d: float
    orders: np.ndarray
    a: np.ndarray
    b: np.ndarray
    center: tuple = (0.0, 0.0)

    @property
    def k1(self):
        return self.k * math.sqrt(1.0 + self.contrast)

    def _polar(self, points):
        p = np.asarray(points, dtype=float)
        dx, dy = p[..., 0] - self.center[0], p[..., 1] - self.center[1]
        return np.hypot(dx, dy), np.arctan2(dy, dx) - self.theta_d

    def incident(self, points):
        p = np.asarray(points, dtype=float)
        d = (math.cos(self.theta_d), math.sin(self.theta_d))
        return np.exp(1j * self.k * (p[..., 0] * d[0] + p[..., 1] * d[1]))

    def _series(self, coef, fn, kr, psi):
        out = np.zeros(np.shape(kr), dtype=complex)
        for m, c in zip(self.orders, coef):
            out += (1j**m * c) * fn(m, kr) * np.exp(1j * m * psi)
        return out

    def total(self, points):
        r, psi = self._polar(points)
        inside = r < self.radius
        out = np.empty(r.shape, dtype=complex)
        out[inside] = self._series(self.b, sf.special.jv, self.k1 * r[inside], psi[inside])
        out[~inside] = self.incident(np.asarray(points)[~inside]) + self._series(
            self.a, sf.special.hankel1, self.k * r[~inside], psi[~inside]
        )
        return out

    def scattered(self, points):
        return self.total(points) - self.incident(points)

    def scattered_exterior(self, points):
        """Outgoing series evaluated at any ``r > 0`` (no interior switch)."""
        r, psi = self._polar(points)
        return self._series(self.a, sf.special.hankel1, self.k * r, psi)

    def far_field(self, angles):
        psi = np.asarray(angles, dtype=float) - self.theta_d
        s = np.zeros(psi.shape, dtype=complex)
        for m, c in zip(self.orders, self.a):
            s += c * np.exp(1j * m * psi)
        return math.sqrt(2.0 / (math.pi * self.k)) * np.exp(-0.25j * math.pi) * s

    def boundary_mismatch(self, n_angles=360):
        """Max jumps of value and normal derivative across ``r = R``."""
        R, k, k1 = self.radius, self.k, self.k1
        psi = 2 * np.pi * np.arange(n_angles) / n_angles
        m = self.orders[:, None]
        ph = (1j ** self.orders)[:, None] * np.exp(1j * m * psi[None, :])
        jr, jpr = sf.special.jv(m, k * R), sf.special.jvp(m, k * R)
        hr, hpr = sf.special.hankel1(m, k * R), sf.special.h1vp(m, k * R)
        j1, jp1 = sf.special.jv(m, k1 * R), sf.special.jvp(m, k1 * R)
        out_val = (ph * (jr + self.a[:, None] * hr)).sum(0)
        out_der = (ph * k * (jpr + self.a[:, None] * hpr)).sum(0)
        in_val = (ph * self.b[:, None] * j1).sum(0)
        in_der = (ph * k1 * self.b[:, None] * jp1).sum(0)
        return float(np.abs(out_val - in_val).max()), float(np.abs(out_der - in_der).max())


def mie_disk(R, V, k, d=(1.0, 0.0), M=None, center=(0.0, 0.0)):
    """Mie-series oracle for the disk of radius ``R`` and constant contrast ``V``.

    ``d`` is the incident direction (unit vector or angle).  Orders
    ``|m| <= M`` are kept; ``M`` defaults to ``ceil(max(k, k_1) R) + 15``.
    """
    k = sf.check_wavenumber(k)
    if not R > 0:
        raise ParameterError("disk radius must be positive")
    if not 1.0 + V > 0:
        raise ParameterError("need 1 + V > 0")
    theta_d = float(d) if np.isscalar(d) else math.atan2(d[1], d[0])
    k1 = k * math.sqrt(1.0 + V)
    if M is None:
        M = math.ceil(max(k, k1) * R) + 15
    if M < math.ceil(k * R) + 15:
        raise ParameterError(f"truncation M = {M} below ceil(kR) + 15 = {math.ceil(k * R) + 15}")
    orders = np.arange(-M, M + 1)
    a = np.empty(len(orders), dtype=complex)
    b = np.empty(len(orders), dtype=complex)
    for i, m in enumerate(orders):
        jr, jpr = sf.special.jv(m, k * R), sf.special.jvp(m, k * R)
        hr, hpr = sf.special.hankel1(m, k * R), sf.special.h1vp(m, k * R)
        j1, jp1 = sf.special.jv(m, k1 * R), sf.special.jvp(m, k1 * R)
        # [H  -J1; k H'  -k1 J1'] [a; b] = -[J; k J']
        A = np.array([[hr, -j1], [k * hpr, -k1 * jp1]])
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if abs(det) <= 1e-14 * np.linalg.norm(A[:, 0]) * np.linalg.norm(A[:, 1]):
            raise DegenerateOrderError(f"interface matching is singular for order m = {m}", m)
        a[i], b[i] = np.linalg.solve(A, -np.array([jr, k * jpr]))
    return MieSolution(float(R), float(V), k, theta_d, orders, a, b, tuple(center))
