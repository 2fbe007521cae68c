"""Integer-order cylinder functions and the 2D outgoing fundamental solution.

Values come from :mod:`scipy.special` (AMOS/Cephes), which already uses the
stable regimes: backward recurrence for ``J_m`` when ``x < m``, forward
recurrence for ``Y_m`` and Hankel asymptotics for large arguments.
"""
import numpy as np
from scipy import special

from .errors import DomainError, ParameterError, SingularityError


def _order(m):
    m = np.asarray(m)
    if not np.all(np.equal(np.mod(m, 1), 0)):
        raise ParameterError("only integer orders are supported")
    return m.astype(int) if m.ndim else int(m)


def bessel_j(m, x):
    return special.jv(_order(m), x)


def bessel_j_prime(m, x):
    return special.jvp(_order(m), x)


def _positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("Y_m and H_m^(1) are singular at x <= 0")
    return x


def bessel_y(m, x):
    return special.yv(_order(m), _positive(x))


def bessel_y_prime(m, x):
    return special.yvp(_order(m), _positive(x))


def bessel_h1(m, x):
    """Hankel function of the first kind, ``J_m + i Y_m``."""
    return special.hankel1(_order(m), _positive(x))


def bessel_h1_prime(m, x):
    return special.h1vp(_order(m), _positive(x))


def check_wavenumber(k):
    k = float(k)
    if not (k > 0 and np.isfinite(k)):
        raise ParameterError(f"wavenumber must be real and positive, got {k}")
    return k


def fundamental_solution(k, x, z):
    """``(i/4) H_0^(1)(k|x - z|)``, the radiating solution of ``-(Delta + k^2) Phi = delta_z``."""
    k = check_wavenumber(k)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    r = np.hypot(x[..., 0] - z[..., 0], x[..., 1] - z[..., 1])
    if np.any(r == 0):
        raise SingularityError("fundamental solution evaluated at its source point")
    return 0.25j * special.hankel1(0, k * r)


def far_field_constant(k):
    """Far-field factor of ``Phi``: ``Phi(x, z) ~ gamma * e^{ik|x|}/sqrt|x| * e^{-ik xhat.z}``."""
    k = check_wavenumber(k)
    return np.exp(0.25j * np.pi) / np.sqrt(8 * np.pi * k)


def disk_average_phi(k, a):
    """Integral of ``Phi(0, y)`` over the disk ``|y| < a``.

    Uses ``d/dr [r H_1(kr)] = k r H_0(kr)`` and ``r H_1(kr) -> -2i/(pi k)``.
    """
    return 0.5j * np.pi * a / k * special.hankel1(1, k * a) - 1.0 / k**2
