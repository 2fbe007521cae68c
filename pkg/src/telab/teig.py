"""Interior transmission eigenvalues.

Two routes are provided.  On a disk with constant contrast the eigenvalues are
zeros of a 2x2 Bessel determinant per angular order and the eigenfunctions are
known in closed form.  On a general masked domain the difference ``w = u - v``
solves the fourth-order pencil

    lambda^2 (1 + V) w + lambda (2 + V) Delta w + Delta^2 w = 0,   w in H_0^2,

discretised with five-point Laplacians and ghost-node clamped conditions, and
``u, v`` are recovered algebraically from ``w``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import specialfn as sf
from .errors import (
    ConvergenceError,
    DegenerateMediumError,
    DegenerateOrderError,
    ParameterError,
    RecoveryDomainError,
    ResolutionError,
    TrivialPairWarning,
)
from .forward import ComplexField2D, Medium
from .geometry import Disk, rasterize

ROOT_SCAN_STEP = 1e-3
ROOT_TOL = 1e-10
DENSE_LIMIT = 4000
PENCIL_RTOL = 1e-6

_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


# -- radial oracle -----------------------------------------------------------


def radial_determinant(m, k, R, V):
    """``d_m(k) = J_m(k1 R) k J_m'(kR) - J_m(kR) k1 J_m'(k1 R)``, ``k1 = k sqrt(1+V)``."""
    if not R > 0:
        raise ParameterError(f"radius must be positive, got {R}")
    if not 1 + V > 0:
        raise ParameterError(f"need 1 + V > 0, got V = {V}")
    k = np.asarray(k, dtype=float)
    k1 = k * math.sqrt(1 + V)
    return sf.bessel_j(m, k1 * R) * k * sf.bessel_j_prime(m, k * R) - sf.bessel_j(m, k * R) * k1 * sf.bessel_j_prime(
        m, k1 * R
    )


def _bisect(f, a, b, fa, tol):
    while b - a > tol:
        c = 0.5 * (a + b)
        fc = f(c)
        if fc == 0:
            return c
        if np.sign(fc) == np.sign(fa):
            a, fa = c, fc
        else:
            b = c
    return 0.5 * (a + b)


def radial_te_roots(m_max, k_min, k_max, R=1.0, V=1.0, step=ROOT_SCAN_STEP, tol=ROOT_TOL):
    """Sign-change roots of ``d_m`` for ``0 <= m <= m_max`` in ``[k_min, k_max]``.

    Returns ``(m, k)`` tuples sorted by ``k``.  Each root is bracketed on a scan
    grid and bisected to ``|dk| <= tol``.
    """
    if not k_min > 0 or not k_max > k_min:
        raise ParameterError(f"need 0 < k_min < k_max, got [{k_min}, {k_max}]")
    if V == 0:
        raise DegenerateMediumError("V = 0: the two Helmholtz equations coincide and d_m vanishes identically")
    n = int(math.ceil((k_max - k_min) / step))
    ks = np.linspace(k_min, k_max, n + 1)
    roots = []
    for m in range(int(m_max) + 1):
        d = radial_determinant(m, ks, R, V)
        f = lambda x, m=m: float(radial_determinant(m, x, R, V))
        for i in np.flatnonzero(d[:-1] == 0):
            roots.append((m, float(ks[i])))
        for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
            roots.append((m, _bisect(f, ks[i], ks[i + 1], d[i], tol)))
    roots.sort(key=lambda t: (t[1], t[0]))
    return roots


# -- eigenpairs ----------------------------------------------------------------


@dataclass
class TransmissionEigenpair:
    lam: complex
    u: ComplexField2D
    v: ComplexField2D
    w: ComplexField2D
    m: int | None = None
    residuals: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def k(self):
        return complex(np.sqrt(self.lam)).real if np.isreal(self.lam) else complex(np.sqrt(self.lam))

    def w_consistency(self):
        """``max |w - (u - v)|`` on the mask."""
        d = self.w.values - (self.u.values - self.v.values)
        return float(np.abs(d[self.w.mask]).max()) if self.w.mask.any() else 0.0


def _disk_bessel_norm(m, k, R):
    """``||J_m(kr) e^{im theta}||_{L^2}`` over the disk of radius ``R``."""
    x = k * R
    jm = sf.bessel_j(m, x)
    jp = sf.bessel_j_prime(m, x)
    return math.sqrt(2 * math.pi * 0.5 * R**2 * (jp**2 + (1 - m**2 / x**2) * jm**2))


def radial_eigenpair(m, k_root, R=None, V=1.0, spec=None, center=None, domain=None):
    """Closed-form eigenpair of order ``m`` on a disk at a root of ``d_m``.

    ``v = J_m(kr) e^{im theta}`` and ``u = c J_m(k1 r) e^{im theta}``, scaled so
    that ``||v||_{L^2(Omega)} = 1``.  ``c`` matches the Dirichlet traces unless
    ``J_m(k1 R)`` vanishes, in which case it matches the Neumann traces.  Fields
    are sampled on every node of ``spec``; the mask marks the disk.
    """
    if domain is not None:
        R = domain.radius
        center = domain.center
    center = (0.0, 0.0) if center is None else center
    domain = Disk(tuple(center), float(R))
    k = sf.check_wavenumber(k_root)
    k1 = k * math.sqrt(1 + V)
    d = float(radial_determinant(m, k, R, V))
    scale = abs(k * sf.bessel_j_prime(m, k * R)) + abs(sf.bessel_j(m, k * R)) * k1
    if abs(d) > 1e-6 * max(scale, 1e-300):
        raise ParameterError(f"k = {k} is not a root of d_{m} (|d| = {abs(d):.3e})")
    a, ap = sf.bessel_j(m, k1 * R), sf.bessel_j_prime(m, k1 * R)
    if abs(a) > 1e-8 * (abs(a) + abs(ap)):
        c = sf.bessel_j(m, k * R) / a
        trace = "dirichlet"
    elif abs(ap) > 0:
        c = k * sf.bessel_j_prime(m, k * R) / (k1 * ap)
        trace = "neumann"
    else:  # pragma: no cover - J_m and J_m' have no common positive zero
        raise DegenerateOrderError("both traces of J_m(k1 r) vanish", m)
    nv = _disk_bessel_norm(m, k, R)

    def fields(points):
        p = np.asarray(points, dtype=float) - np.asarray(center)
        r = np.hypot(p[..., 0], p[..., 1])
        e = np.exp(1j * m * np.arctan2(p[..., 1], p[..., 0]))
        return c * sf.bessel_j(m, k1 * r) * e / nv, sf.bessel_j(m, k * r) * e / nv

    # trace check at 360 boundary angles
    t = 2 * np.pi * np.arange(360) / 360
    du = c * sf.bessel_j(m, k1 * R) - sf.bessel_j(m, k * R)
    dn = c * k1 * sf.bessel_j_prime(m, k1 * R) - k * sf.bessel_j_prime(m, k * R)
    info = {
        "normalised_by": trace,
        "c": float(c),
        "trace_dirichlet_max": float(abs(du) / nv * np.abs(np.exp(1j * m * t)).max()),
        "trace_neumann_max": float(abs(dn) / nv * np.abs(np.exp(1j * m * t)).max()),
        "R": float(R),
        "V": float(V),
    }
    info["fields"] = fields
    if spec is None:
        return TransmissionEigenpair(k * k, None, None, None, m=m, info=info)
    mask = rasterize(domain, spec).mask
    uu, vv = fields(spec.points())
    pair = TransmissionEigenpair(
        k * k,
        ComplexField2D(spec, uu, mask),
        ComplexField2D(spec, vv, mask),
        ComplexField2D(spec, uu - vv, mask),
        m=m,
        info=info,
    )
    pair.residuals = te_residual(pair, Medium(domain, V), k)
    return pair


# -- grid pencil -------------------------------------------------------------


@dataclass
class QepDiscretization:
    """Pencil ``lambda^2 M2 + lambda M1 + M0`` on the interior unknowns.

    ``D`` maps unknowns to the clamped Laplacian at unknowns and boundary ring
    nodes (ghost values mirrored across the ring), ``Wt`` weighs ring rows by
    ``1/2`` and ``M0 = D^T Wt D``.  ``lap`` is the Dirichlet five-point
    Laplacian on the unknowns.
    """

    spec: object
    mask: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    ring_ix: np.ndarray
    ring_iy: np.ndarray
    V: np.ndarray
    lap: sp.csr_matrix
    D: sp.csr_matrix
    Wt: sp.dia_matrix
    M0: sp.csr_matrix
    M1: sp.csr_matrix
    M2: sp.dia_matrix

    @property
    def n(self):
        return len(self.ix)

    def scatter(self, vec, fill=0.0):
        """Grid array from a vector on the unknowns."""
        out = np.full(self.spec.shape, fill, dtype=np.result_type(vec, float))
        out[self.ix, self.iy] = vec
        return out

    def norm_M0(self):
        return float(spla.norm(self.M0, 1))

    def pencil_residual(self, lam, w):
        r = lam * lam * (self.M2 @ w) + lam * (self.M1 @ w) + self.M0 @ w
        return float(np.linalg.norm(r) / np.linalg.norm(w))


def qep_assemble(med, spec, min_nodes=10):
    """Discrete pencil for ``med`` on ``spec`` with clamped conditions."""
    mask = rasterize(med.domain, spec).mask
    ix, iy = np.nonzero(mask)
    if ix.size == 0:
        raise ResolutionError("no grid node lies inside the domain")
    span = min(ix.max() - ix.min() + 1, iy.max() - iy.min() + 1)
    if span < min_nodes:
        raise ResolutionError(f"need >= {min_nodes} interior nodes per direction, got {span}")
    V = med.sample(spec, mask)[ix, iy]
    nx, ny = spec.shape
    idx = np.full((nx + 2, ny + 2), -1, dtype=int)  # padded: no wrap-around at the edges
    pm = np.zeros((nx + 2, ny + 2), dtype=bool)
    pm[1:-1, 1:-1] = mask
    idx[ix + 1, iy + 1] = np.arange(ix.size)
    # boundary ring: outside nodes 4-adjacent to the mask
    ring = np.zeros_like(pm)
    for dx, dy in _STEPS:
        ring |= np.roll(pm, (dx, dy), axis=(0, 1))
    ring &= ~pm
    rx, ry = np.nonzero(ring)
    n, nr = ix.size, rx.size
    h2 = spec.h**2

    rows, cols, vals = [], [], []
    # unknown rows: Dirichlet five-point Laplacian
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(np.full(n, -4.0))
    for dx, dy in _STEPS:
        j = idx[ix + 1 + dx, iy + 1 + dy]
        ok = j >= 0
        rows.append(np.flatnonzero(ok))
        cols.append(j[ok])
        vals.append(np.ones(ok.sum()))
    lap = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)) / h2
    # ring rows: w = 0 at the ring, ghost w(b+e) = w(b-e) when b+e is outside
    rr, rc = [], []
    for dx, dy in _STEPS:
        j = idx[rx + dx, ry + dy]
        g = idx[rx - dx, ry - dy]
        ok = j >= 0
        rr.append(np.flatnonzero(ok))
        rc.append(j[ok])
        # ghost: the outside neighbour b - e takes the mirrored value w(b + e)
        ok = ok & (g < 0)
        rr.append(np.flatnonzero(ok))
        rc.append(j[ok])
    rv = [np.ones(len(a)) for a in rr]
    R = sp.csr_matrix((np.concatenate(rv), (np.concatenate(rr), np.concatenate(rc))), shape=(nr, n)) / h2
    D = sp.vstack([lap, R]).tocsr()
    Wt = sp.diags(np.concatenate([np.ones(n), np.full(nr, 0.5)]))
    M0 = (D.T @ Wt @ D).tocsr()
    M1 = (sp.diags(2.0 + V) @ lap).tocsr()
    M2 = sp.diags(1.0 + V)
    return QepDiscretization(spec, mask, ix, iy, rx - 1, ry - 1, V, lap, D, Wt, M0, M1, M2)


def _companion(disc):
    n = disc.n
    m2 = 1.0 / (1.0 + disc.V)
    C = np.zeros((2 * n, 2 * n))
    C[:n, n:] = np.eye(n)
    C[n:, :n] = -(m2[:, None] * disc.M0.toarray())
    C[n:, n:] = -(m2[:, None] * disc.M1.toarray())
    return C


def _null_space(disc, lam, p=1, iters=3):
    """Subspace inverse iteration on ``Q(lam)`` for an eigenvalue of multiplicity ``p``."""
    Q = (lam * lam * disc.M2 + lam * disc.M1 + disc.M0).tocsc()
    # a tiny shift keeps the factorisation non-singular
    Q = Q + (1e-13 * disc.norm_M0()) * sp.eye(disc.n, format="csc")
    lu = spla.splu(Q)
    rng = np.random.default_rng(0)
    X = rng.standard_normal((disc.n, p)).astype(Q.dtype)
    for _ in range(iters):
        X = np.linalg.qr(lu.solve(X))[0]
    return X


def _is_real(lam, rtol=1e-8):
    return abs(lam.imag) <= rtol * max(abs(lam), 1.0)


def _dense_eigs(disc, window):
    ev = sla.eig(_companion(disc), right=False)
    lo, hi = window
    sel = ev[(ev.real >= lo) & (ev.real <= hi)]
    return list(sel)


def _sparse_eigs(disc, window, max_modes, nev=10, max_shifts=200):
    """Shift-invert Arnoldi on the companion pencil over a lattice of real shifts.

    Each shift returns the ``nev`` eigenvalues nearest to it, so the disk of
    radius ``max |lambda - sigma|`` is fully resolved.  Uncovered parts of the
    window are split and revisited from the left.
    """
    n = disc.n
    nev = min(nev, 2 * n - 3)
    lo, hi = window
    todo = [(lo, hi)]
    found = []
    shifts = []
    while todo:
        todo.sort()
        a, b = todo.pop(0)
        reals = sorted(x.real for x in found if _is_real(x) and lo <= x.real <= hi)
        if max_modes is not None and len(reals) >= max_modes and reals[max_modes - 1] <= a:
            break
        if len(shifts) >= max_shifts:
            raise ConvergenceError(
                f"window [{lo}, {hi}] not covered after {max_shifts} shifts", condition={"shifts": shifts}
            )
        sigma = 0.5 * (a + b)
        shifts.append(sigma)
        Q = (sigma * sigma * disc.M2 + sigma * disc.M1 + disc.M0).tocsc()
        lu = spla.splu(Q)
        M1, M2 = disc.M1, disc.M2

        def op(z, lu=lu, sigma=sigma):
            z = np.asarray(z).ravel()
            p, q = z[:n], z[n:]
            x = lu.solve(-(M2 @ q) - M1 @ p - sigma * (M2 @ p))
            return np.concatenate([x, p + sigma * x])

        OP = spla.LinearOperator((2 * n, 2 * n), matvec=op, dtype=float)
        try:
            theta = spla.eigs(OP, k=nev, which="LM", return_eigenvectors=False, v0=np.ones(2 * n), tol=1e-12)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"Arnoldi stagnated at shift {sigma}", condition={"shift": sigma}) from exc
        lam = sigma + 1.0 / theta
        rad = float(np.abs(lam - sigma).max())
        # merge keeping multiplicities: a cluster seen again adds only its surplus
        for x in lam:
            close = lambda y, x=x: abs(x - y) <= 1e-8 * max(abs(x), 1.0)
            if sum(map(close, lam)) > sum(map(close, found)):
                found.append(complex(x))
        if sigma - rad > a:
            todo.append((a, sigma - rad))
        if sigma + rad < b:
            todo.append((sigma + rad, b))
    return [x for x in found if lo <= x.real <= hi]


def qep_solve(disc, window, max_modes=None, method="auto"):
    """Eigenpairs ``(lambda, w)`` of the pencil with ``Re lambda`` in ``window``.

    Real eigenvalues come first in increasing order, followed by complex ones
    (retained as found).  ``method`` is ``"dense"`` (companion matrix, default
    when its dimension is at most 4000), ``"sparse"`` (shift-invert Arnoldi) or
    ``"auto"``.  Every returned pair satisfies the pencil residual bound
    ``||Q(lambda) w|| / ||w|| <= 1e-6 ||M0||``.
    """
    lo, hi = map(float, window)
    if not 0 < lo < hi:
        raise ParameterError(f"eigenvalue window must be a positive interval, got {window}")
    if method == "auto":
        method = "dense" if 2 * disc.n <= DENSE_LIMIT else "sparse"
    if method == "dense":
        lams = _dense_eigs(disc, (lo, hi))
    elif method == "sparse":
        lams = _sparse_eigs(disc, (lo, hi), max_modes)
    else:
        raise ParameterError(f"unknown method {method!r}")
    lams = [complex(x.real, 0.0) if _is_real(x) else complex(x) for x in lams]
    lams.sort(key=lambda x: (not _is_real(x), x.real, x.imag))
    if max_modes is not None:
        lams = lams[: int(max_modes)]
    bound = PENCIL_RTOL * disc.norm_M0()
    out = []
    i = 0
    while i < len(lams):
        j = i + 1
        while j < len(lams) and abs(lams[j] - lams[i]) <= 1e-8 * max(abs(lams[i]), 1.0):
            j += 1
        lam_ = lams[i].real if _is_real(lams[i]) else lams[i]
        X = _null_space(disc, lam_, j - i)
        for c in range(j - i):
            w = X[:, c]
            res = disc.pencil_residual(lam_, w)
            if not res <= bound:
                raise ConvergenceError(
                    f"pencil residual {res:.3e} exceeds {bound:.3e} at lambda = {lam_}",
                    condition={"lambda": lam_, "residual": res},
                )
            out.append((lams[c + i].real if _is_real(lam_) else lams[c + i], _real_phase(w) if _is_real(lam_) else w))
        i = j
    return out


def _real_phase(x):
    i = int(np.argmax(np.abs(x)))
    x = x * (abs(x[i]) / x[i])
    return x.real if np.abs(x.imag).max() <= 1e-10 * np.abs(x).max() else x


def _first_significant(vals, rtol=1e-8):
    a = np.abs(vals)
    return int(np.flatnonzero(a > rtol * a.max())[0])


def recover_pair(w, lam, disc):
    """``u = -(Delta_h w + lambda w) / (lambda V)``, ``v = u - w``.

    Fields are normalised to ``||v||_{L^2} = 1`` with ``v`` real and positive at
    the first interior node (index order) where it is not negligible.
    """
    if lam == 0:
        raise ParameterError("lambda must be nonzero")
    if np.any(np.abs(disc.V) < 1e-8):
        raise RecoveryDomainError("contrast vanishes on part of the mask; u cannot be recovered from w")
    w = np.asarray(w)
    u = -(disc.lap @ w + lam * w) / (lam * disc.V)
    v = u - w
    cell = disc.spec.cell_area()
    nv = math.sqrt(cell * float((np.abs(v) ** 2).sum()))
    if nv == 0:
        raise RecoveryDomainError("recovered v vanishes identically")
    i = _first_significant(v)
    phase = abs(v[i]) / v[i]
    s = phase / nv
    u, v, w = u * s, v * s, w * s
    if np.isrealobj(lam) or _is_real(complex(lam)):
        if np.abs(np.imag(u)).max() <= 1e-10 * np.abs(u).max() and np.abs(np.imag(v)).max() <= 1e-10 * np.abs(v).max():
            u, v, w = np.real(u), np.real(v), np.real(w)
    spec, mask = disc.spec, disc.mask
    pair = TransmissionEigenpair(
        lam,
        ComplexField2D(spec, disc.scatter(u), mask),
        ComplexField2D(spec, disc.scatter(v), mask),
        ComplexField2D(spec, disc.scatter(w), mask),
    )
    return pair


# -- residuals -----------------------------------------------------------------


def _lap5(a, h):
    out = np.full(a.shape, np.nan, dtype=a.dtype)
    out[1:-1, 1:-1] = (a[2:, 1:-1] + a[:-2, 1:-1] + a[1:-1, 2:] + a[1:-1, :-2] - 4 * a[1:-1, 1:-1]) / h**2
    return out


def te_residual(pair, med, k=None):
    """Discrete residuals of an eigenpair.

    ``pde_u``/``pde_v``: ``L^2`` norms of the five-point residuals of
    ``(Delta + k^2 (1+V)) u`` and ``(Delta + k^2) v`` over mask nodes at least
    two cells from the boundary.  ``trace_dirichlet``/``trace_neumann``: for
    every mask node with an outside neighbour along ``e``, the value and the
    derivative along ``e`` of ``u - v`` at the boundary crossing, extrapolated
    from a backward one-sided quadratic and combined as ``sqrt(h * sum |.|^2)``.
    """
    spec = pair.u.spec
    h = spec.h
    lam = pair.lam if k is None else complex(k) ** 2
    lam = lam.real if _is_real(complex(lam)) else lam
    mask = pair.u.mask
    u = np.where(mask, pair.u.values, 0) if pair.info.get("fields") is None else pair.u.values
    v = np.where(mask, pair.v.values, 0) if pair.info.get("fields") is None else pair.v.values
    if not (np.any(pair.u.values[mask]) or np.any(pair.v.values[mask])):
        warnings.warn("eigenpair fields vanish identically", TrivialPairWarning, stacklevel=2)
    V = med.sample(spec, mask)
    deep = (rasterize(med.domain, spec).sdist <= -2 * h) & mask
    cell = spec.cell_area()
    ru = _lap5(u, h) + lam * (1 + V) * u
    rv = _lap5(v, h) + lam * v
    pde_u = math.sqrt(cell * float(np.nansum(np.abs(ru[deep]) ** 2)))
    pde_v = math.sqrt(cell * float(np.nansum(np.abs(rv[deep]) ** 2)))

    f = u - v
    nx, ny = spec.shape
    pad = np.zeros((nx + 4, ny + 4), dtype=bool)
    pad[2:-2, 2:-2] = mask
    fp = np.zeros((nx + 4, ny + 4), dtype=f.dtype)
    fp[2:-2, 2:-2] = f
    sd = np.zeros((nx + 4, ny + 4))
    sd[2:-2, 2:-2] = rasterize(med.domain, spec).sdist
    ix, iy = np.nonzero(mask)
    px, py = ix + 2, iy + 2
    dsum = nsum = 0.0
    for dx, dy in _STEPS:
        edge = ~pad[px + dx, py + dy]
        if not edge.any():
            continue
        ex, ey = px[edge], py[edge]
        f0, f1, f2 = fp[ex, ey], fp[ex - dx, ey - dy], fp[ex - 2 * dx, ey - 2 * dy]
        b1 = pad[ex - dx, ey - dy]
        b2 = b1 & pad[ex - 2 * dx, ey - 2 * dy]
        # boundary crossing between the node and its outside neighbour
        s0, s1 = sd[ex, ey], sd[ex + dx, ey + dy]
        t = np.clip(h * s0 / np.where(s0 - s1 < 0, s0 - s1, -1.0), 0.0, h)
        d1 = np.where(b2, (3 * f0 - 4 * f1 + f2) / (2 * h), np.where(b1, (f0 - f1) / h, 0.0))
        d2 = np.where(b2, (f0 - 2 * f1 + f2) / h**2, 0.0)
        dsum += float((np.abs(f0 + t * d1 + 0.5 * t * t * d2) ** 2).sum())
        nsum += float((np.abs(d1 + t * d2) ** 2).sum())
    return {
        "pde_u": pde_u,
        "pde_v": pde_v,
        "trace_dirichlet": math.sqrt(h * dsum),
        "trace_neumann": math.sqrt(h * nsum),
    }


def grid_eigenpairs(med, spec, window, max_modes=None, method="auto"):
    """Assemble, solve and recover in one call; pairs carry their residuals."""
    disc = qep_assemble(med, spec)
    pairs = []
    for lam, w in qep_solve(disc, window, max_modes, method):
        p = recover_pair(w, lam, disc)
        p.residuals = te_residual(p, med)
        p.info["pencil_residual"] = disc.pencil_residual(lam, w)
        pairs.append(p)
    return disc, pairs
