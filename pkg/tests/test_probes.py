import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from telab import (
    ComplexField2D,
    DirectionQuadrature,
    Disk,
    DomainError,
    GridSpec,
    HerglotzDensity,
    Medium,
    NotNearEigenvalueWarning,
    ParameterError,
    ResolutionError,
    ShapeError,
    calderon_recover,
    cgo_pair,
    corner_identity_defect,
    corner_profile,
    corners,
    invisibility_defect,
    localization_scan,
    radial_eigenpair,
    radial_te_roots,
    rasterize,
    surface_ratio,
    unit_square,
)
from telab.probes import fourier_lattice, running_max
from telab.teig import TransmissionEigenpair

DISK = Disk((0.0, 0.0), 1.0)
SQUARE = unit_square()


def _field(dom, spec, values):
    mask = rasterize(dom, spec).mask
    return ComplexField2D(spec, np.where(mask, values, 0), mask)


# -- corner averages ---------------------------------------------------------------


def test_constant_field_ratio_is_one():
    spec = GridSpec.covering(SQUARE, 1 / 80)
    v = _field(SQUARE, spec, np.ones(spec.shape))
    res = corner_profile(v, corners(SQUARE)[0], [0.1, 0.05], SQUARE)
    assert np.allclose(res.ratio(), 1.0) and np.allclose(res.ratio("edge"), 1.0)


def test_corner_radius_validation():
    spec = GridSpec.covering(SQUARE, 1 / 40)
    v = _field(SQUARE, spec, np.ones(spec.shape))
    c = corners(SQUARE)[0]
    with pytest.raises(ParameterError):
        corner_profile(v, c, [0.05, 0.1], SQUARE)
    with pytest.raises(ParameterError):
        corner_profile(v, c, [0.1, -0.05], SQUARE)
    with pytest.raises(ResolutionError):
        corner_profile(v, c, [0.9], SQUARE)


def test_corner_ball_too_small():
    spec = GridSpec.covering(SQUARE, 1 / 20)
    v = _field(SQUARE, spec, np.ones(spec.shape))
    with pytest.raises(ResolutionError, match="minimum admissible radius"):
        corner_profile(v, corners(SQUARE)[0], [0.06], SQUARE)


def test_corner_profile_sees_a_vanishing_corner():
    spec = GridSpec.covering(SQUARE, 1 / 80)
    P = spec.points()
    # x y vanishes at the corner (0, 0) and nowhere else in the interior
    v = _field(SQUARE, spec, P[..., 0] * P[..., 1])
    res = corner_profile(v, corners(SQUARE)[0], [0.2, 0.1, 0.05], SQUARE)
    r = res.ratio()
    assert np.all(np.diff(r) < 0) and r[-1] < 0.05


# -- near invisibility -----------------------------------------------------------


def test_zero_contrast_is_invisible():
    spec = GridSpec.covering(DISK, 0.1)
    g = HerglotzDensity(DirectionQuadrature(16), np.ones(16))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotNearEigenvalueWarning)
        rep = invisibility_defect(Medium(DISK, 0.0), 2.0, g, spec)
    assert rep.far_field_norm == 0.0 and rep.incident_norm > 0


def test_off_eigenvalue_warning():
    spec = GridSpec.covering(DISK, 0.1)
    g = HerglotzDensity(DirectionQuadrature(16), np.ones(16))
    with pytest.warns(NotNearEigenvalueWarning):
        invisibility_defect(Medium(DISK, 1.0), 2.0, g, spec)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NotNearEigenvalueWarning)
        invisibility_defect(Medium(DISK, 1.0), 2.0, g, spec, eigenvalues=[2.001])


# -- corner identity ----------------------------------------------------------------


def _exact_pair(h, m=0, V=1.0, window=(7.3, 7.4)):
    k = [kk for mm, kk in radial_te_roots(m, *window, 1.0, V) if mm == m][0]
    return radial_eigenpair(m, k, 1.0, V, GridSpec.covering(DISK, h))


def test_identity_zero_pair():
    spec = GridSpec.covering(DISK, 0.05)
    mask = rasterize(DISK, spec).mask
    z = ComplexField2D(spec, np.zeros(spec.shape), mask)
    recs = corner_identity_defect(TransmissionEigenpair(9.0, z, z, z), (1.0, 0.0), 0.3, Medium(DISK, 1.0))
    assert all(r.lhs == 0 and r.rhs == 0 and r.defect == 0 for r in recs)


def test_identity_defect_converges_on_disk_sector():
    med = Medium(DISK, 1.0)
    d = []
    for h in (0.04, 0.02, 0.01):
        recs = corner_identity_defect(_exact_pair(h), (1.0, 0.0), 0.3, med, s_values=(1.0,))
        d.append(recs[0].defect)
    assert d[0] / d[1] >= 1.5 and d[1] / d[2] >= 1.5
    assert d[2] < 0.05


def test_identity_rejects_non_null_rho():
    with pytest.raises(ParameterError):
        corner_identity_defect(_exact_pair(0.05), (1.0, 0.0), 0.3, Medium(DISK, 1.0), rho=np.array([1.0, 0.0]))


def test_identity_ball_too_small():
    with pytest.raises(ResolutionError):
        corner_identity_defect(_exact_pair(0.05), (1.0, 0.0), 0.08, Medium(DISK, 1.0))


# -- surface ratio ----------------------------------------------------------------


def test_constant_field_surface_ratio():
    spec = GridSpec.covering(DISK, 0.005)
    w = _field(DISK, spec, np.ones(spec.shape))
    # sqrt(area(N_eps) / area(Omega)) = sqrt(1 - (1 - eps)^2)
    assert surface_ratio(w, Medium(DISK, 1.0), 0.05) == pytest.approx(math.sqrt(1 - 0.95**2), rel=0.02)
    assert surface_ratio(w, Medium(DISK, 1.0), 1.0) == 1.0


def test_surface_ratio_errors():
    spec = GridSpec.covering(DISK, 0.05)
    with pytest.raises(DomainError):
        surface_ratio(_field(DISK, spec, np.zeros(spec.shape)), Medium(DISK, 1.0), 0.1)
    with pytest.raises(ResolutionError):
        surface_ratio(_field(DISK, spec, np.ones(spec.shape)), Medium(DISK, 1.0), 1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 0.5), st.floats(0.01, 0.5), st.integers(0, 2**32 - 1))
def test_surface_ratio_monotone_in_width(e1, de, seed):
    spec = GridSpec.covering(DISK, 0.05)
    w = _field(DISK, spec, np.random.default_rng(seed).standard_normal(spec.shape))
    med = Medium(DISK, 1.0)
    assert surface_ratio(w, med, e1) <= surface_ratio(w, med, e1 + de)


# -- localisation ----------------------------------------------------------------


def test_high_order_modes_are_more_localised():
    recs = localization_scan(Medium(DISK, 1.0), 40, 0.1)
    assert max(recs[0].rho_u, recs[0].rho_v) < max(recs[40].rho_u, recs[40].rho_v)
    assert [r.m for r in recs] == list(range(41))


def test_full_band_ratio_is_one():
    recs = localization_scan(Medium(DISK, 1.0), 5, 1.0)
    assert all(r.rho_u == 1.0 and r.rho_v == 1.0 for r in recs)


def test_localization_matches_grid_quadrature():
    # closed-form ratio against the grid ratio of the constructed eigenpair
    rec = localization_scan(Medium(DISK, 1.0), 2, 0.2)[2]
    p = radial_eigenpair(2, rec.k, 1.0, 1.0, GridSpec.covering(DISK, 0.005))
    assert surface_ratio(p.v, Medium(DISK, 1.0), 0.2) == pytest.approx(rec.rho_v, rel=0.02)
    assert surface_ratio(p.u, Medium(DISK, 1.0), 0.2) == pytest.approx(rec.rho_u, rel=0.02)


def test_running_max_is_nondecreasing():
    rm = running_max(localization_scan(Medium(DISK, 3.0), 12, 0.1))
    assert np.all(np.diff(rm) >= 0)


def test_localization_argument_checks():
    with pytest.raises(ParameterError):
        localization_scan(Medium(SQUARE, 1.0), 3, 0.1)
    with pytest.raises(ParameterError):
        localization_scan(Medium(DISK, 1.0), 3, 0.0)


# -- CGO and Calderon ---------------------------------------------------------------------


@settings(max_examples=1000, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_cgo_invariants(a, b):
    p = cgo_pair([a, b])
    scale = max(1.0, a * a + b * b)
    d1, d2, d3 = p.defects()
    assert d1 <= 1e-14 * scale and d2 <= 1e-14 * scale and d3 <= 1e-14 * max(1.0, abs(a), abs(b))


def test_cgo_zero_frequency():
    p = cgo_pair([0.0, 0.0])
    assert not np.any(p.rho1) and not np.any(p.rho2)
    with pytest.raises(ShapeError):
        cgo_pair([1.0, 2.0, 3.0])


def test_cgo_exponentials_are_harmonic():
    p = cgo_pair([2.0, -1.0])
    X, Y = oracles.grid(-0.5, 0.5, 0.01)
    P = np.stack([X, Y], -1)
    for rho in (p.rho1, p.rho2):
        u = np.exp(P @ rho)
        lap = oracles.lap5(u, 0.01)
        assert np.nanmax(np.abs(lap)) <= 1e-3 * np.nanmax(np.abs(u))


def test_cgo_product_is_a_fourier_mode():
    xi = np.array([1.5, 0.7])
    p = cgo_pair(xi)
    x = np.random.default_rng(2).uniform(-2, 2, (50, 2))
    prod = np.exp(x @ p.rho1) * np.exp(x @ p.rho2)
    assert np.allclose(prod, np.exp(1j * x @ xi), rtol=1e-13, atol=0)


def _bump(spec):
    P = spec.points()
    r2 = (P[..., 0] - 0.1) ** 2 + (P[..., 1] + 0.2) ** 2
    return np.exp(-r2 / 0.08)


def test_calderon_zero_and_linearity():
    spec = GridSpec((-1.0, -1.0), 2 / 32, 32, 32)
    z = calderon_recover(np.zeros(spec.shape), spec)
    assert not np.any(z.recovered)
    a = calderon_recover(_bump(spec), spec).recovered
    rng = np.random.default_rng(0)
    other = rng.standard_normal(spec.shape)
    b = calderon_recover(other, spec).recovered
    ab = calderon_recover(2 * _bump(spec) - 3 * other, spec).recovered
    assert np.allclose(ab, 2 * a - 3 * b, atol=1e-10)


def test_calderon_lattice_mismatch():
    spec = GridSpec((-1.0, -1.0), 2 / 32, 32, 32)
    lat = fourier_lattice(spec) * 1.01
    with pytest.raises(ShapeError):
        calderon_recover(_bump(spec), spec, lattice=lat)
    with pytest.raises(ShapeError):
        calderon_recover(np.zeros((8, 8)), spec)


def test_calderon_recovers_bump():
    spec = GridSpec((-1.0, -1.0), 2 / 32, 32, 32)
    assert calderon_recover(_bump(spec), spec).relative_error <= 0.05
