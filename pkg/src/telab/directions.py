"""Direction quadrature on the unit circle and Herglotz waves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError


@dataclass(frozen=True)
class DirectionQuadrature:
    """Equispaced trapezoidal rule on S^1: ``phi_j = 2*pi*j/n``, ``w_j = 2*pi/n``."""

    n: int = 64

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise ParameterError(f"direction quadrature needs at least 8 nodes, got {self.n}")

    @property
    def angles(self):
        return 2 * np.pi * np.arange(self.n) / self.n

    @property
    def weights(self):
        return np.full(self.n, 2 * np.pi / self.n)

    @property
    def weight(self):
        return 2 * np.pi / self.n

    @property
    def directions(self):
        t = self.angles
        return np.column_stack([np.cos(t), np.sin(t)])

    def antipodal(self):
        """Index permutation sending ``xhat_i`` to ``-xhat_i``; needs even ``n``."""
        if self.n % 2:
            raise ParameterError("antipodal map needs an even number of directions")
        return (np.arange(self.n) + self.n // 2) % self.n

    def norm(self, values):
        """Discrete ``L^2(S^1)`` norm along the last axis."""
        values = np.asarray(values)
        return np.sqrt(self.weight * (np.abs(values) ** 2).sum(axis=-1))


@dataclass
class HerglotzDensity:
    quadrature: DirectionQuadrature
    g: np.ndarray

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=complex)
        if self.g.shape != (self.quadrature.n,):
            raise ShapeError(f"density has shape {self.g.shape}, quadrature has {self.quadrature.n} nodes")
        if not np.all(np.isfinite(self.g)):
            raise ParameterError("density values must be finite")

    def norm(self):
        return float(self.quadrature.norm(self.g))

    @classmethod
    def zeros(cls, quadrature):
        return cls(quadrature, np.zeros(quadrature.n, dtype=complex))

    @classmethod
    def fourier_mode(cls, quadrature, m):
        """``g_j = exp(i m phi_j)``."""
        return cls(quadrature, np.exp(1j * m * quadrature.angles))


def herglotz_matrix(k, points, quadrature):
    """Matrix ``H[p, j] = w_j exp(i k x_p . d_j)`` so that ``v_g = H @ g``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    phase = pts @ quadrature.directions.T
    return quadrature.weight * np.exp(1j * k * phase)


def herglotz_eval(density, k, points):
    """Herglotz wave ``v_g(x) = sum_j w_j e^{ik x.d_j} g_j`` at ``points`` (shape ``(..., 2)``)."""
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    out = np.empty(int(np.prod(shape)), dtype=complex)
    flat = pts.reshape(-1, 2)
    step = 4096
    for s in range(0, len(flat), step):
        out[s : s + step] = herglotz_matrix(k, flat[s : s + step], density.quadrature) @ density.g
    return out.reshape(shape)
