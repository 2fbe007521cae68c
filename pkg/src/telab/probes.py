"""Numerical probes of eigenfunction behaviour.

Corner averages of ``|v|``, far fields of Herglotz approximations of
eigenfunctions, the local integral identity around a boundary point,
boundary-layer mass ratios, and Fourier recovery of a contrast difference from
products of complex geometric optics exponentials.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq

from . import specialfn as sf
from .errors import (
    DegenerateMediumError,
    DomainError,
    NotNearEigenvalueWarning,
    ParameterError,
    ResolutionError,
    ShapeError,
)
from .forward import ComplexField2D, HerglotzIncident, ScatteringSolver
from .geometry import CornerDescriptor, Disk, boundary_band
from .teig import radial_determinant, radial_te_roots

MIN_BALL_NODES = 5
MIN_IDENTITY_NODES = 20


# -- corner averages -------------------------------------------------------------


@dataclass
class CornerProbeResult:
    corner: np.ndarray
    radii: np.ndarray
    corner_avg: np.ndarray
    interior_avg: np.ndarray
    edge_avg: np.ndarray
    interior_point: np.ndarray
    edge_point: np.ndarray = field(repr=False, default=None)

    def ratio(self, reference="interior"):
        ref = self.interior_avg if reference == "interior" else self.edge_avg
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.corner_avg / ref


def _ball_average(absv, pts, mask, centre, r):
    d = np.hypot(pts[..., 0] - centre[0], pts[..., 1] - centre[1])
    sel = mask & (d < r)
    n = int(sel.sum())
    return (float(absv[sel].mean()) if n else np.nan), n


def _min_admissible_radius(pts, mask, centre, need):
    d = np.sort(np.hypot(pts[..., 0] - centre[0], pts[..., 1] - centre[1])[mask])
    return float(d[need - 1]) if d.size >= need else np.inf


def corner_profile(v, corner, radii, domain, interior_point=None):
    """Averages of ``|v|`` over ``B_r(x) ∩ Omega`` at a corner and two references.

    The references are ``interior_point`` (default: the centroid) and the
    midpoint of the corner's next edge moved inward by ``r``.  Averages are
    plain node means, i.e. grid quadrature divided by the covered area.
    """
    if not isinstance(corner, CornerDescriptor):
        raise ParameterError("corner must be a CornerDescriptor")
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise ParameterError("radii must be positive and strictly decreasing")
    xc = np.asarray(corner.vertex, dtype=float)
    verts = getattr(domain, "vertices", None)
    far = np.max(np.linalg.norm(verts - xc, axis=1)) if verts is not None else 2 * domain.radius
    if radii[0] >= far / 2:
        raise ResolutionError(f"largest radius {radii[0]} must be below half the distance to the farthest vertex ({far / 2})")
    spec, mask = v.spec, v.mask
    pts = spec.points()
    absv = np.abs(v.values)
    xi = np.asarray(domain.centroid() if interior_point is None else interior_point, dtype=float)
    if verts is not None:
        i = int(np.argmin(np.linalg.norm(verts - xc, axis=1)))
        nxt = verts[(i + 1) % len(verts)]
    else:
        nxt = xc + corner.to_next * corner.size
    mid = 0.5 * (xc + nxt)
    normal_in = np.array([-corner.to_next[1], corner.to_next[0]])
    ca, ia, ea, eps = [], [], [], []
    for r in radii:
        e = mid + r * normal_in
        vals = []
        for p in (xc, xi, e):
            a, n = _ball_average(absv, pts, mask, p, r)
            if n < MIN_BALL_NODES:
                rmin = _min_admissible_radius(pts, mask, p, MIN_BALL_NODES)
                raise ResolutionError(
                    f"ball of radius {r} at {tuple(np.round(p, 6))} holds {n} nodes; minimum admissible radius is {rmin:.6g}"
                )
            vals.append(a)
        ca.append(vals[0])
        ia.append(vals[1])
        ea.append(vals[2])
        eps.append(e)
    return CornerProbeResult(xc, radii, np.array(ca), np.array(ia), np.array(ea), xi, np.array(eps))


# -- near invisibility -----------------------------------------------------------


@dataclass
class InvisibilityReport:
    k: float
    far_field_norm: float
    incident_norm: float
    fit_error: float | None

    @property
    def normalised(self):
        return self.far_field_norm / self.incident_norm if self.incident_norm else 0.0


def invisibility_defect(med, k, g, spec, fit_error=None, eigenvalues=None, solver=None):
    """Far-field norm of the wave scattered by the Herglotz incident ``v_g``.

    ``eigenvalues`` (wavenumbers) is used only to warn when ``k`` is not close
    to any of them; for a constant-contrast disk the radial roots are used when
    it is omitted.
    """
    k = sf.check_wavenumber(k)
    if eigenvalues is None and isinstance(med.domain, Disk) and med.is_constant and med.contrast != 0:
        eigenvalues = [kk for _, kk in radial_te_roots(int(k * med.domain.radius) + 10, 0.5 * k, 1.5 * k, med.domain.radius, med.contrast)]
    if eigenvalues is not None and (not len(eigenvalues) or np.min(np.abs(np.asarray(eigenvalues) - k)) > 1e-2 * k):
        warnings.warn(f"k = {k} is not near a transmission eigenvalue; the defect need not be small", NotNearEigenvalueWarning, stacklevel=2)
    S = solver or ScatteringSolver(med, k, spec)
    quad = g.quadrature
    vg = HerglotzIncident(g)(k, spec.points())
    inc_norm = ComplexField2D(spec, vg, S.mask).l2_norm()
    if S.trivial:
        return InvisibilityReport(k, 0.0, inc_norm, fit_error)
    res = S.solve(HerglotzIncident(g))
    ff = S.far_field_unknowns(res.total.values[S.ix, S.iy], quad.directions)
    return InvisibilityReport(k, float(quad.norm(ff)), inc_norm, fit_error)


# -- corner integral identity -----------------------------------------------------


@dataclass
class IdentityRecord:
    s: float
    lhs: complex
    rhs: complex
    defect: float


def _inside_runs(domain, centre, r, n=720):
    """Angular intervals where the circle ``|x - centre| = r`` lies inside ``domain``."""
    t = 2 * np.pi * np.arange(n + 1) / n
    sd = lambda a: float(domain.signed_distance(np.array([centre[0] + r * math.cos(a), centre[1] + r * math.sin(a)])))
    vals = domain.signed_distance(np.column_stack([centre[0] + r * np.cos(t), centre[1] + r * np.sin(t)]))
    inside = vals < 0
    if inside.all():
        return [(0.0, 2 * np.pi)]
    # rotate so the scan starts outside
    start = int(np.argmin(inside))
    runs = []
    edges = []
    for step in range(n):
        a, b = (start + step) % n, (start + step + 1) % n
        if inside[a] != inside[b]:
            ta, tb = t[a], t[a] + 2 * np.pi / n
            edges.append(brentq(sd, ta, tb, xtol=1e-14) if vals[a] * vals[b] < 0 else ta)
    for a, b in zip(edges[0::2], edges[1::2]):
        runs.append((a, b if b > a else b + 2 * np.pi))
    return runs


def _interp(field, spec):
    x, y = spec.axes()
    vals = np.nan_to_num(np.asarray(field.values, dtype=complex))
    re = RegularGridInterpolator((x, y), vals.real, method="cubic")
    im = RegularGridInterpolator((x, y), vals.imag, method="cubic")
    return lambda p: re(p) + 1j * im(p)


def corner_identity_defect(pair, x_c, h_ball, med, s_values=(1.0, 2.0, 4.0), rho=None, n_quad=64):
    """Relative defect of the local identity

        k^2 ∫_{S} [v - (1+V) u] u0 = ∫_{Λ} [∂_ν(u - v) u0 - (u - v) ∂_ν u0]

    with ``S = B_h(x_c) ∩ Omega``, ``Λ`` the arc of ``∂B_h(x_c)`` inside
    ``Omega`` and ``u0 = exp(s rho·(x - x_c))``, ``rho·rho = 0``.  Both sides use
    Gauss-Legendre quadrature in polar coordinates on cubic interpolants of
    the grid fields; ``∂_ν`` is a second-order one-sided radial difference.
    """
    spec = pair.u.spec
    h = spec.h
    x_c = np.asarray(x_c, dtype=float)
    if rho is None:
        # decay into the domain along the inward normal at x_c
        g = np.array([0.0, 0.0])
        for a in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
            g += np.array([math.cos(a), math.sin(a)]) * float(
                med.domain.signed_distance(x_c + 0.5 * h_ball * np.array([math.cos(a), math.sin(a)]))
            )
        d = g / np.linalg.norm(g)  # outward
        rho = np.array([-d[0] - 1j * d[1], -d[1] + 1j * d[0]])
    rho = np.asarray(rho, dtype=complex)
    if abs(rho @ rho) > 1e-12 * max(float(np.vdot(rho, rho).real), 1e-300):
        raise ParameterError("rho·rho must vanish for u0 to be harmonic")
    pts = spec.points()
    dist = np.hypot(pts[..., 0] - x_c[0], pts[..., 1] - x_c[1])
    nodes = int((pair.u.mask & (dist < h_ball)).sum())
    if nodes < MIN_IDENTITY_NODES:
        raise ResolutionError(f"S_h holds {nodes} grid nodes, need {MIN_IDENTITY_NODES}")
    V = float(med.contrast) if med.is_constant else None
    if V is None:
        Vf = _interp(ComplexField2D(spec, med.sample(spec, pair.u.mask), pair.u.mask), spec)
    lam = pair.lam
    U, Vv = _interp(pair.u, spec), _interp(pair.v, spec)
    W = _interp(pair.u - pair.v, spec)
    gx, gw = np.polynomial.legendre.leggauss(n_quad)

    def circle(r, a):
        return np.column_stack([x_c[0] + r * np.cos(a), x_c[1] + r * np.sin(a)])

    # area integral: radial Gauss nodes, angular runs per radius
    area_pts, area_wts = [], []
    for xr, wr in zip(gx, gw):
        r = 0.5 * h_ball * (xr + 1)
        for a, b in _inside_runs(med.domain, x_c, r):
            ta = 0.5 * (b - a) * (gx + 1) + a
            area_pts.append(circle(r, ta))
            area_wts.append(0.5 * h_ball * wr * 0.5 * (b - a) * gw * r)
    P = np.vstack(area_pts)
    Wq = np.concatenate(area_wts)
    one_plus_V = 1 + (V if V is not None else Vf(P).real)
    f_area = lam * (Vv(P) - one_plus_V * U(P))
    # arc integral
    arc_pts, arc_wts, arc_dirs = [], [], []
    for a, b in _inside_runs(med.domain, x_c, h_ball):
        ta = 0.5 * (b - a) * (gx + 1) + a
        arc_pts.append(ta)
        arc_wts.append(0.5 * (b - a) * gw * h_ball)
    ta = np.concatenate(arc_pts) if arc_pts else np.zeros(0)
    aw = np.concatenate(arc_wts) if arc_wts else np.zeros(0)
    nu = np.column_stack([np.cos(ta), np.sin(ta)])
    w0, w1, w2 = W(circle(h_ball, ta)), W(circle(h_ball - h, ta)), W(circle(h_ball - 2 * h, ta))
    dw = (3 * w0 - 4 * w1 + w2) / (2 * h)
    out = []
    for s in s_values:
        u0a = np.exp(s * ((P - x_c) @ rho))
        lhs = complex(np.sum(Wq * f_area * u0a))
        xa = circle(h_ball, ta)
        u0 = np.exp(s * ((xa - x_c) @ rho))
        du0 = s * (nu @ rho) * u0
        rhs = complex(np.sum(aw * (dw * u0 - w0 * du0)))
        den = max(abs(lhs), abs(rhs), 1e-300)
        out.append(IdentityRecord(float(s), lhs, rhs, abs(lhs - rhs) / den))
    return out


# -- surface localisation ----------------------------------------------------------


def surface_ratio(field, med, eps):
    """``||w||_{L^2(N_eps)} / ||w||_{L^2(Omega)}`` by grid quadrature."""
    band = boundary_band(med.domain, field.spec, eps) & field.mask
    if not band.any():
        raise ResolutionError(f"boundary band of width {eps} contains no grid node")
    total = field.l2_norm()
    if total == 0:
        raise DomainError("surface ratio is undefined for a zero field")
    return min(field.l2_norm(band) / total, 1.0)


@dataclass
class LocalizationRecord:
    index: int
    m: int
    k: float
    eps: float
    rho_u: float
    rho_v: float


def _lommel(m, kk, a):
    """``∫_0^a J_m(kk r)^2 r dr``."""
    if a <= 0:
        return 0.0
    x = kk * a
    return 0.5 * a * a * (sf.bessel_j_prime(m, x) ** 2 + (1 - m * m / (x * x)) * sf.bessel_j(m, x) ** 2)


def smallest_radial_root(m, R, V, step=1e-3, chunk=5.0):
    """First sign change of ``d_m`` above ``0``, searched in windows of ``chunk / R``."""
    lo = max(0.5 * m / (R * math.sqrt(1 + max(V, 0.0))), 0.05 / R)
    for _ in range(200):
        hi = lo + chunk / R
        roots = [k for mm, k in radial_te_roots(0, lo, hi, R, V, step) if mm == 0] if m == 0 else [
            k for mm, k in _order_roots(m, lo, hi, R, V, step)
        ]
        if roots:
            return roots[0]
        lo = hi
    raise DomainError(f"no transmission eigenvalue of order {m} found")


def _order_roots(m, lo, hi, R, V, step):
    ks = np.linspace(lo, hi, int(math.ceil((hi - lo) / step)) + 1)
    d = radial_determinant(m, ks, R, V)
    out = []
    for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        out.append((m, brentq(lambda x: float(radial_determinant(m, x, R, V)), ks[i], ks[i + 1], xtol=1e-12)))
    return out


def localization_scan(med, m_max, eps):
    """Boundary-layer ratios of the first eigenpair of every order ``m <= m_max``.

    Ratios are exact: the radial norms come from the closed form of
    ``∫ J_m(kr)^2 r dr``.
    """
    if not isinstance(med.domain, Disk) or not med.is_constant:
        raise ParameterError("localization scan needs a disk with constant contrast")
    V = med.contrast
    if V == 0:
        raise DegenerateMediumError("zero contrast has no transmission eigenvalues")
    R = med.domain.radius
    if not eps > 0:
        raise ParameterError(f"band width must be positive, got {eps}")
    inner = max(R - eps, 0.0)
    out = []
    for m in range(int(m_max) + 1):
        k = smallest_radial_root(m, R, V)
        k1 = k * math.sqrt(1 + V)
        ratios = []
        for kk in (k1, k):
            tot = _lommel(m, kk, R)
            ratios.append(min(math.sqrt(max(tot - _lommel(m, kk, inner), 0.0) / tot), 1.0))
        out.append(LocalizationRecord(m, m, float(k), float(eps), ratios[0], ratios[1]))
    return out


def running_max(records):
    return np.maximum.accumulate([max(r.rho_u, r.rho_v) for r in records])


# -- complex geometric optics and Fourier recovery ----------------------------------


@dataclass(frozen=True)
class CgoPair:
    xi: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray

    def defects(self):
        """``(|rho1·rho1|, |rho2·rho2|, |rho1 + rho2 - i xi|)``."""
        return (
            float(abs(self.rho1 @ self.rho1)),
            float(abs(self.rho2 @ self.rho2)),
            float(np.abs(self.rho1 + self.rho2 - 1j * self.xi).max()),
        )


def cgo_pair(xi):
    """``rho_1 = (i xi + xi_perp)/2``, ``rho_2 = (i xi - xi_perp)/2``, ``xi_perp`` = ``xi`` turned by ``pi/2``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (2,):
        raise ShapeError("xi must be a real 2-vector")
    perp = np.array([-xi[1], xi[0]])
    return CgoPair(xi, 0.5 * (1j * xi + perp), 0.5 * (1j * xi - perp))


def fourier_lattice(spec):
    """Frequencies conjugate to the grid, shape ``(nx, ny, 2)``."""
    fx = 2 * np.pi * np.fft.fftfreq(spec.nx, d=spec.h)
    fy = 2 * np.pi * np.fft.fftfreq(spec.ny, d=spec.h)
    FX, FY = np.meshgrid(fx, fy, indexing="ij")
    return np.stack([FX, FY], axis=-1)


@dataclass
class CalderonResult:
    recovered: np.ndarray
    moments: np.ndarray
    relative_error: float


def calderon_recover(dV, spec, lattice=None):
    """Recover ``dV`` from the moments ``∫ dV exp(rho_1·x) exp(rho_2·x) dx``.

    One CGO pair per lattice frequency; the moments are the Fourier transform
    of ``dV`` sampled on the lattice, inverted by an inverse DFT.
    """
    dV = np.asarray(dV)
    if dV.shape != spec.shape:
        raise ShapeError(f"dV has shape {dV.shape}, grid is {spec.shape}")
    ref = fourier_lattice(spec)
    if lattice is None:
        lattice = ref
    lattice = np.asarray(lattice, dtype=float)
    if lattice.shape != ref.shape or not np.allclose(lattice, ref, rtol=1e-12, atol=1e-12):
        raise ShapeError("frequency lattice is not the conjugate lattice of the grid")
    X = spec.points().reshape(-1, 2)
    flat = dV.reshape(-1)
    xis = lattice.reshape(-1, 2)
    cell = spec.cell_area()
    moments = np.empty(len(xis), dtype=complex)
    for j, xi in enumerate(xis):
        p = cgo_pair(xi)
        moments[j] = cell * np.sum(flat * np.exp(X @ p.rho1) * np.exp(X @ p.rho2))
    # inverse of M(xi) = h^2 sum_x dV(x) e^{i xi.x} on the conjugate lattice
    x0, y0 = spec.origin
    M = moments.reshape(spec.shape)
    fx, fy = lattice[:, 0, 0], lattice[0, :, 1]
    M = M * np.exp(-1j * (fx[:, None] * x0 + fy[None, :] * y0))
    rec = np.fft.fft2(M) / (cell * spec.nx * spec.ny)
    if not np.iscomplexobj(dV):
        rec = rec.real
    nrm = np.linalg.norm(dV)
    err = float(np.linalg.norm(rec - dV) / nrm) if nrm else float(np.linalg.norm(rec))
    return CalderonResult(rec, M, err)
