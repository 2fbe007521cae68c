import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from telab import (
    ComplexField2D,
    Disk,
    GridSpec,
    Medium,
    ParameterError,
    PlacementError,
    PlaneWave,
    PointSource,
    ResolutionError,
    ScatteringSolver,
    far_field,
    incident_eval,
    mie_disk,
    solve_scattering,
)
from telab.errors import DegenerateOrderError, ResolutionWarning, SolverError

mp = oracles.mp
DISK = Disk((0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def coarse():
    spec = GridSpec.covering(DISK, 0.05)
    S = ScatteringSolver(Medium(DISK, 1.0), 2.0, spec)
    return spec, S


# -- incident fields ------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.1, 20))
def test_plane_wave_is_one_at_origin(theta, k):
    assert PlaneWave.from_angle(theta)(k, np.zeros(2)) == pytest.approx(1.0, abs=1e-15)


def test_plane_wave_fd_residual_second_order():
    k = 3.0
    inc = PlaneWave.from_angle(0.4)
    res = []
    for h in (0.04, 0.02):
        spec = GridSpec((-1.0, -1.0), h, int(round(2 / h)) + 1, int(round(2 / h)) + 1)
        u = incident_eval(inc, k, spec).values
        res.append(np.nanmax(np.abs(oracles.lap5(u, h) + k * k * u)))
    assert 3.5 < res[0] / res[1] < 4.5


def test_point_source_inside_is_rejected():
    spec = GridSpec.covering(DISK, 0.1)
    with pytest.raises(PlacementError):
        incident_eval(PointSource((0.2, 0.1)), 1.0, spec, domain=DISK)
    with pytest.raises(PlacementError):
        ScatteringSolver(Medium(DISK, 1.0), 1.0, spec).solve(PointSource((0.0, 0.0)))


def test_plane_wave_direction_must_be_unit():
    with pytest.raises(ParameterError):
        PlaneWave((1.0, 1.0))


# -- media ----------------------------------------------------------------------------------


def test_medium_validation():
    with pytest.raises(ParameterError):
        Medium(DISK, -1.0)
    with pytest.raises(ParameterError):
        Medium(DISK, 1j)
    spec = GridSpec.covering(DISK, 0.1)
    with pytest.raises(ParameterError):
        Medium(DISK, np.full(spec.shape, -2.0)).sample(spec)


def test_radial_profile_contrast():
    spec = GridSpec.covering(DISK, 0.1)
    V = Medium(DISK, lambda r: 1 - r**2).sample(spec)
    i, j = spec.index_of((0.0, 0.0))
    assert V[i, j] == pytest.approx(1.0)
    assert V[0, 0] == 0.0


# -- Lippmann-Schwinger ---------------------------------------------------------------------


def test_zero_contrast_gives_incident_field():
    spec = GridSpec.covering(DISK, 0.05)
    u, us = solve_scattering(Medium(DISK, 0.0), 2.0, PlaneWave((1.0, 0.0)), spec)
    assert np.array_equal(u.values, PlaneWave((1.0, 0.0))(2.0, spec.points()))
    assert not np.any(us.values)


def test_zero_wavenumber_rejected():
    with pytest.raises(ParameterError):
        ScatteringSolver(Medium(DISK, 1.0), 0.0, GridSpec.covering(DISK, 0.1))


def test_discrete_equation_residual(coarse):
    spec, S = coarse
    r = S.solve(PlaneWave((0.0, 1.0)))
    assert r.residual <= 1e-10


def test_resolution_warning_and_strict_error():
    spec = GridSpec.covering(DISK, 0.1)
    with pytest.warns(ResolutionWarning):
        ScatteringSolver(Medium(DISK, 1.0), 6.0, spec)
    with pytest.raises(ResolutionError):
        ScatteringSolver(Medium(DISK, 1.0), 6.0, spec, strict=True)


def test_gmres_path_matches_direct(coarse):
    spec, S = coarse
    Si = ScatteringSolver(Medium(DISK, 1.0), 2.0, spec, dense_limit=10)
    assert not Si.dense
    rhs = PlaneWave((1.0, 0.0))(2.0, spec.points())[S.ix, S.iy]
    a, b = S.solve_unknowns(rhs), Si.solve_unknowns(rhs)
    assert np.linalg.norm(a - b) / np.linalg.norm(a) < 1e-7


def test_far_field_linearity_and_zero(coarse):
    spec, S = coarse
    med = Medium(DISK, 1.0)
    u, _ = solve_scattering(med, 2.0, PlaneWave((1.0, 0.0)), spec)
    t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    f1 = far_field(med, 2.0, u, t)
    f2 = far_field(med, 2.0, ComplexField2D(spec, 2 * u.values, u.mask), t)
    assert np.array_equal(f2, 2 * f1)
    assert not np.any(far_field(Medium(DISK, 0.0), 2.0, u, t))
    with pytest.raises(ParameterError):
        far_field(med, 2.0, u, np.array([[1.0, 1.0]]))


def test_superposition_of_incident_fields(coarse):
    spec, S = coarse
    a, b = PlaneWave.from_angle(0.3), PointSource((2.5, -0.4))
    t = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    P = spec.points()
    fa = S.far_field_unknowns(S.solve(a).total.values[S.ix, S.iy], t)
    fb = S.far_field_unknowns(S.solve(b).total.values[S.ix, S.iy], t)
    both = S.solve_unknowns((a(2.0, P) + b(2.0, P))[S.ix, S.iy])
    fab = S.far_field_unknowns(both, t)
    assert np.linalg.norm(fab - fa - fb) <= 1e-12 * np.linalg.norm(fab)


def test_refinement_towards_mie():
    mie = mie_disk(1.0, 1.0, 2.0)
    errs = []
    for h in (0.1, 0.05, 0.025):
        spec = GridSpec.covering(DISK, h)
        _, us = solve_scattering(Medium(DISK, 1.0), 2.0, PlaneWave((1.0, 0.0)), spec)
        errs.append(oracles.l2_rel(us.values, mie.scattered(spec.points())))
    assert errs[0] / errs[1] >= 1.5 and errs[1] / errs[2] >= 1.5


def test_ill_conditioned_system_reported(monkeypatch):
    spec = GridSpec.covering(DISK, 0.2)
    assert ScatteringSolver(Medium(DISK, 1.0), 1.0, spec).rcond > 1e-6
    # every finite matrix fails an rcond floor above 1
    monkeypatch.setattr("telab.forward.MIN_RCOND", 2.0)
    with pytest.raises(SolverError) as ei:
        ScatteringSolver(Medium(DISK, 1.0), 1.0, spec)
    assert ei.value.condition is not None


# -- Mie oracle ----------------------------------------------------------------------------------


def _mp_coefficient(m, R, V, k):
    k, R = mp.mpf(k), mp.mpf(R)
    k1 = k * mp.sqrt(1 + mp.mpf(V))
    J, Jp = mp.besselj(m, k * R), mp.besselj(m, k * R, derivative=1)
    H = mp.hankel1(m, k * R)
    Hp = mp.besselj(m, k * R, derivative=1) + 1j * mp.bessely(m, k * R, derivative=1)
    J1, J1p = mp.besselj(m, k1 * R), mp.besselj(m, k1 * R, derivative=1)
    a = -(k * Jp * J1 - k1 * J * J1p) / (k * Hp * J1 - k1 * H * J1p)
    b = (J + a * H) / J1
    return complex(a), complex(b)


@pytest.mark.parametrize("m", [0, 1, 4, -3, 12])
def test_mie_coefficients_against_mpmath(m):
    s = mie_disk(1.0, 1.0, 2.0)
    i = int(np.flatnonzero(s.orders == m)[0])
    a, b = _mp_coefficient(abs(m), 1.0, 1.0, 2.0)
    assert s.a[i] == pytest.approx(a, rel=1e-10, abs=1e-300)
    assert s.b[i] == pytest.approx(b, rel=1e-10)


def test_mie_zero_contrast():
    s = mie_disk(1.0, 0.0, 2.0)
    assert np.allclose(s.a, 0, atol=1e-14)
    assert np.allclose(s.b, 1, atol=1e-14)


def test_mie_boundary_matching():
    s = mie_disk(1.0, 1.0, 2.0)
    dv, dn = s.boundary_mismatch(360)
    assert dv <= 1e-10 and dn <= 1e-10
    # independent check of the value jump at a few angles with mpmath Bessel functions
    for psi in (0.0, 1.1, 2.9):
        out = inn = 0
        for m, a, b in zip(s.orders, s.a, s.b):
            e = complex(1j**m * mp.expj(m * psi))
            out += e * (oracles.mp_jv(int(m), 2.0) + a * complex(mp.hankel1(int(m), 2.0)))
            inn += e * b * oracles.mp_jv(int(m), s.k1)
        assert abs(out - inn) < 1e-10


def test_mie_truncation_precondition():
    with pytest.raises(ParameterError):
        mie_disk(1.0, 1.0, 2.0, M=3)
    with pytest.raises(ParameterError):
        mie_disk(1.0, -1.5, 2.0)


def test_mie_degenerate_order_reported(monkeypatch):
    # real k never makes the matching matrix singular, so zero out the cylinder functions
    class Zero:
        @staticmethod
        def jv(m, x):
            return 0.0 * x

        jvp = hankel1 = h1vp = jv

    monkeypatch.setattr("telab.specialfn.special", Zero)
    with pytest.raises(DegenerateOrderError) as ei:
        mie_disk(1.0, 1.0, 2.0)
    # the first order tried is -M with M = ceil(k1 R) + 15
    assert ei.value.order == -(math.ceil(2 * math.sqrt(2)) + 15)


@pytest.mark.parametrize("V,k", [(1.0, 2.0), (3.0, 1.3), (0.5, 5.0)])
def test_optical_theorem(V, k):
    s = mie_disk(1.0, V, k)
    t = 2 * np.pi * np.arange(2048) / 2048
    total = (np.abs(s.far_field(t)) ** 2).sum() * 2 * np.pi / 2048
    forward = -math.sqrt(8 * math.pi / k) * (np.exp(0.25j * np.pi) * s.far_field(np.array([0.0]))[0]).real
    assert abs(total - forward) <= 0.01 * total


def test_far_field_constant_against_exterior_series():
    k = 2.0
    s = mie_disk(1.0, 1.0, k)
    r = 1e3 / k
    t = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    us = s.scattered_exterior(np.column_stack([r * np.cos(t), r * np.sin(t)]))
    approx = s.far_field(t) * np.exp(1j * k * r) / math.sqrt(r)
    assert oracles.l2_rel(approx, us) < 2e-3
