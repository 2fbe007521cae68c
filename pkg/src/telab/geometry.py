"""Planar domains, Cartesian grids and boundary descriptors.

Domains are either disks or simple counter-clockwise polygons.  Grids are
uniform and node-centred; arrays defined on a grid have shape ``(nx, ny)``
with ``x`` varying along axis 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, ParameterError

#: Vertices whose interior angle is within this distance of pi are flat.
CORNER_ANGLE_TOL = 1e-6


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise ParameterError("disk center must be a 2-vector")
        if not self.radius > 0:
            raise ParameterError(f"disk radius must be positive, got {self.radius}")

    @property
    def kind(self):
        return "disk"

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cx + r), (cy - r, cy + r)

    def area(self):
        return math.pi * self.radius**2

    def diameter(self):
        return 2.0 * self.radius

    def centroid(self):
        return np.array(self.center)

    def signed_distance(self, points):
        p = np.asarray(points, dtype=float)
        c = np.asarray(self.center)
        return np.hypot(p[..., 0] - c[0], p[..., 1] - c[1]) - self.radius


@dataclass(frozen=True)
class Polygon:
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ParameterError("a polygon needs at least 3 vertices in the plane")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if _signed_area(v) <= 0:
            raise ParameterError("polygon vertices must be ordered counter-clockwise")
        if not _is_simple(v):
            raise ParameterError("polygon is self-intersecting")

    @property
    def kind(self):
        return "polygon"

    def bbox(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return (lo[0], hi[0]), (lo[1], hi[1])

    def area(self):
        return _signed_area(self.vertices)

    def diameter(self):
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = cross.sum() / 2.0
        cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * a)
        cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * a)
        return np.array([cx, cy])

    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def signed_distance(self, points):
        p = np.asarray(points, dtype=float)
        shape = p.shape[:-1]
        p = p.reshape(-1, 2)
        a, b = self.edges()
        dist = np.full(len(p), np.inf)
        inside = np.zeros(len(p), dtype=bool)
        for (ax, ay), (bx, by) in zip(a, b):
            ex, ey = bx - ax, by - ay
            t = ((p[:, 0] - ax) * ex + (p[:, 1] - ay) * ey) / (ex * ex + ey * ey)
            t = np.clip(t, 0.0, 1.0)
            dx = p[:, 0] - (ax + t * ex)
            dy = p[:, 1] - (ay + t * ey)
            dist = np.minimum(dist, np.hypot(dx, dy))
            # even-odd ray cast towards +x
            crosses = (ay > p[:, 1]) != (by > p[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = ax + (p[:, 1] - ay) * ex / ey
            inside ^= crosses & (p[:, 0] < xint)
        return np.where(inside, -dist, dist).reshape(shape)


Domain = Disk | Polygon


def _signed_area(v):
    w = np.roll(v, -1, axis=0)
    return 0.5 * float((v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]).sum())


def _segments_intersect(p1, p2, q1, q2):
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    # collinear overlaps
    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


def _is_simple(v):
    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                return False
    return True


def regular_polygon(n, radius=1.0, center=(0.0, 0.0), phase=0.0):
    t = phase + 2 * np.pi * np.arange(n) / n
    return Polygon(np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)]))


def unit_square():
    return Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@dataclass(frozen=True)
class GridSpec:
    """Uniform node grid ``x_i = x0 + i*h``, ``y_j = y0 + j*h``."""

    origin: tuple
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        if not self.h > 0:
            raise ParameterError(f"grid spacing must be positive, got {self.h}")
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ParameterError("grid counts must be integers")

    @classmethod
    def covering(cls, domain, h, margin=2):
        """Smallest grid aligned to multiples of ``h`` that covers ``domain``
        with ``margin`` spare cells on every side."""
        (xmin, xmax), (ymin, ymax) = domain.bbox()
        i0 = math.floor(xmin / h + 1e-9) - margin
        j0 = math.floor(ymin / h + 1e-9) - margin
        i1 = math.ceil(xmax / h - 1e-9) + margin
        j1 = math.ceil(ymax / h - 1e-9) + margin
        return cls((i0 * h, j0 * h), h, i1 - i0 + 1, j1 - j0 + 1)

    @property
    def shape(self):
        return (self.nx, self.ny)

    def axes(self):
        x0, y0 = self.origin
        return x0 + self.h * np.arange(self.nx), y0 + self.h * np.arange(self.ny)

    def points(self):
        """Node coordinates, shape ``(nx, ny, 2)``."""
        x, y = self.axes()
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def cell_area(self):
        return self.h * self.h

    def index_of(self, point):
        """Nearest node index to ``point``."""
        x0, y0 = self.origin
        return int(round((point[0] - x0) / self.h)), int(round((point[1] - y0) / self.h))

    def check_covers(self, domain, margin=2):
        if self.nx < 2 or self.ny < 2:
            raise CoverageError(f"grid needs at least 2 nodes per direction, got {self.nx}x{self.ny}")
        (xmin, xmax), (ymin, ymax) = domain.bbox()
        x, y = self.axes()
        tol = 1e-9 * self.h
        if (
            xmin - x[0] < margin * self.h - tol
            or x[-1] - xmax < margin * self.h - tol
            or ymin - y[0] < margin * self.h - tol
            or y[-1] - ymax < margin * self.h - tol
        ):
            raise CoverageError(f"grid does not cover the domain with {margin} cells of margin")


@dataclass(frozen=True)
class Raster:
    """Node-centre rasterisation of a domain."""

    spec: GridSpec
    mask: np.ndarray
    sdist: np.ndarray

    def area(self):
        return self.mask.sum() * self.spec.cell_area()


def rasterize(domain, spec, margin=2):
    """Mark grid nodes strictly inside ``domain`` and sample its signed distance.

    Nodes within roundoff (``1e-9 h``) of the boundary count as boundary nodes.
    """
    spec.check_covers(domain, margin)
    sd = domain.signed_distance(spec.points())
    return Raster(spec, sd < -1e-9 * spec.h, sd)


@dataclass(frozen=True)
class CornerDescriptor:
    vertex: np.ndarray
    angle: float
    to_prev: np.ndarray
    to_next: np.ndarray
    size: float

    def bisector(self):
        """Unit vector pointing into the domain along the angle bisector."""
        b = self.to_prev + self.to_next
        nb = np.linalg.norm(b)
        if nb < 1e-12:
            b = np.array([-self.to_next[1], self.to_next[0]])
            nb = 1.0
        b = b / nb
        return b if self.angle < np.pi else -b


def corners(domain):
    """Corner points of a polygon; a disk has none."""
    if isinstance(domain, Disk):
        return []
    v = domain.vertices
    n = len(v)
    out = []
    for i in range(n):
        p, c, q = v[i - 1], v[i], v[(i + 1) % n]
        a_in = c - p
        a_out = q - c
        turn = math.atan2(a_in[0] * a_out[1] - a_in[1] * a_out[0], a_in @ a_out)
        angle = math.pi - turn
        if abs(angle - math.pi) <= CORNER_ANGLE_TOL:
            continue
        lp, lq = np.linalg.norm(p - c), np.linalg.norm(q - c)
        out.append(CornerDescriptor(c.copy(), angle, (p - c) / lp, (q - c) / lq, float(min(lp, lq))))
    return out


def boundary_band(domain, spec, eps, margin=2):
    """Mask of grid nodes inside ``domain`` closer than ``eps`` to its boundary."""
    if not eps > 0:
        raise ParameterError(f"band width must be positive, got {eps}")
    r = rasterize(domain, spec, margin)
    return r.mask & (-r.sdist <= eps)
