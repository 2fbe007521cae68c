import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telab import (
    CutoffError,
    DegenerateMediumError,
    DirectionQuadrature,
    Disk,
    FarFieldMatrix,
    GridSpec,
    Medium,
    ParameterError,
    PointSource,
    SamplingMesh,
    ShapeError,
    assemble_far_field_matrix,
    classify,
    indicator_map,
    te_scan,
    tikhonov_solve,
)
from telab import specialfn as sf
from telab.lsm import LSMResult, TikhonovSolver, default_eps, jaccard, otsu_threshold, phi_infty_rhs

DISK = Disk((0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def F():
    return assemble_far_field_matrix(Medium(DISK, 1.0), 2.0, DirectionQuadrature(32), GridSpec.covering(DISK, 0.05))


@pytest.fixture(scope="module")
def lsm_map(F):
    mesh = SamplingMesh.from_bounds((-2, 2), (-2, 2), 0.05)
    return indicator_map(F, mesh)


def _radius(mesh):
    P = mesh.points()
    return np.hypot(P[..., 0], P[..., 1])


# -- right-hand side ------------------------------------------------------------------


def test_rhs_at_origin_is_constant():
    q = DirectionQuadrature(16)
    r = phi_infty_rhs(np.zeros(2), 2.0, q)
    assert np.all(r == sf.far_field_constant(2.0))


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 10))
def test_rhs_is_unimodular(x, y, k):
    r = phi_infty_rhs(np.array([x, y]), k, DirectionQuadrature(16))
    assert np.allclose(np.abs(r), abs(sf.far_field_constant(k)), rtol=1e-13)


def test_rhs_matches_point_source_far_field():
    k, z = 2.0, np.array([0.4, -0.3])
    q = DirectionQuadrature(16)
    R = 1e4
    x = R * q.directions
    phi = PointSource(tuple(z))(k, x)
    approx = phi * np.sqrt(R) * np.exp(-1j * k * R)
    r = phi_infty_rhs(z, k, q)
    assert np.linalg.norm(approx - r) / np.linalg.norm(r) <= 0.02


# -- Tikhonov -----------------------------------------------------------------------------


def test_huge_regularisation(F):
    rhs = phi_infty_rhs(np.array([0.2, 0.1]), F.k, F.quadrature)
    eps = 1e6 * np.linalg.norm(F.entries, 2) ** 2
    g = tikhonov_solve(F, rhs, eps)
    b = F.quadrature.weight * F.entries.conj().T @ rhs
    # penalty dominates: g = F*W rhs / eps up to a 1e-5 relative correction
    assert np.linalg.norm(g.g - b / eps) <= 1e-5 * np.linalg.norm(b) / eps
    assert np.linalg.norm(g.g) <= np.linalg.norm(b) / eps * (1 + 1e-3)


def test_identity_operator_scalar_case():
    q = DirectionQuadrature(8)
    b = np.arange(8) - 2.5j
    g = tikhonov_solve(FarFieldMatrix(1.0, q, np.eye(8)), b, 0.3, weight=1.0)
    assert np.allclose(g.g, b / 1.3, rtol=1e-15, atol=0)


def test_misfit_monotone_in_eps(F):
    rhs = phi_infty_rhs(np.array([0.3, -0.2]), F.k, F.quadrature)
    misfit = []
    for e in 10.0 ** -np.arange(1, 9):
        g = tikhonov_solve(F, rhs, e)
        misfit.append(np.linalg.norm(F.entries @ (F.quadrature.weight * g.g) - rhs))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(misfit, misfit[1:]))


def test_normal_equation_residual(F):
    ts = TikhonovSolver(F, default_eps(F))
    rhs = phi_infty_rhs(np.array([0.1, 0.5]), F.k, F.quadrature)
    assert ts.normal_residual(ts.solve(rhs), rhs) <= 1e-10


def test_tikhonov_shape_and_eps_errors(F):
    with pytest.raises(ShapeError):
        tikhonov_solve(F, np.ones(7), 1e-3)
    with pytest.raises(ParameterError):
        tikhonov_solve(F, np.ones(32), 0.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tikhonov_minimises_objective(F, seed):
    eps = default_eps(F)
    w = F.quadrature.weight
    rhs = phi_infty_rhs(np.array([0.3, 0.0]), F.k, F.quadrature)
    g = tikhonov_solve(F, rhs, eps).g

    def J(x):
        r = F.entries @ x - rhs
        return w * np.vdot(r, r).real + eps * np.vdot(x, x).real

    best = J(g)
    rng = np.random.default_rng(seed)
    for _ in range(100):
        d = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        d *= 1e-3 * np.linalg.norm(g) / np.linalg.norm(d)
        assert J(g + d) >= best * (1 - 1e-12)


# -- indicator maps -------------------------------------------------------------------------


def test_inside_median_below_outside(lsm_map):
    inside = _radius(lsm_map.mesh) < 1
    assert np.median(lsm_map.indicator[inside]) < np.median(lsm_map.indicator[~inside])
    assert np.all(lsm_map.indicator >= 0)


def test_rhs_scaling_doubles_indicator(F):
    ts = TikhonovSolver(F, default_eps(F))
    pts = np.array([[0.0, 0.0], [0.5, 1.5], [1.9, -1.9]])
    rhs = phi_infty_rhs(pts, F.k, F.quadrature)
    a = F.quadrature.norm(ts.solve(rhs))
    b = F.quadrature.norm(ts.solve(2 * rhs))
    assert np.array_equal(b, 2 * a)


def test_far_point_exceeds_centre(lsm_map):
    R = _radius(lsm_map.mesh)
    far = np.unravel_index(np.argmax(R), R.shape)
    centre = np.unravel_index(np.argmin(R), R.shape)
    assert lsm_map.indicator[far] >= lsm_map.indicator[centre]


def test_relabelling_invariance(F):
    mesh = SamplingMesh.from_bounds((-1.5, 1.5), (-1.5, 1.5), 0.25)
    base = indicator_map(F, mesh).indicator.ravel()
    ts = TikhonovSolver(F, default_eps(F))
    pts = mesh.points().reshape(-1, 2)
    perm = np.random.default_rng(3).permutation(len(pts))
    again = F.quadrature.norm(ts.solve(phi_infty_rhs(pts[perm], F.k, F.quadrature)))
    assert np.allclose(again, base[perm], rtol=1e-12, atol=0)


def test_radial_means_increase_outside(lsm_map):
    R = _radius(lsm_map.mesh)
    edges = np.linspace(1.0, 2.0, 9)
    means = [lsm_map.indicator[(R >= a) & (R < b)].mean() for a, b in zip(edges, edges[1:])]
    inversions = sum(b < a for a, b in zip(means, means[1:]))
    assert inversions <= 1


# -- classification -------------------------------------------------------------------------


def test_separated_classes_are_perfect():
    mesh = SamplingMesh.from_bounds((-2, 2), (-2, 2), 0.1)
    truth = _radius(mesh) < 1
    res = LSMResult(1.0, 1.0, mesh, np.where(truth, 1.0, 100.0))
    assert np.array_equal(classify(res), truth)
    assert 1.0 <= res.cutoff < 100.0


def test_constant_indicator_fails():
    mesh = SamplingMesh.from_bounds((0, 1), (0, 1), 0.1)
    with pytest.raises(CutoffError):
        classify(LSMResult(1.0, 1.0, mesh, np.ones(mesh.shape)))


def test_explicit_cutoff(lsm_map):
    m = classify(lsm_map, 0.1)
    assert np.array_equal(m, lsm_map.indicator <= 0.1) and lsm_map.cutoff == 0.1


def test_disk_reconstruction_overlap(lsm_map):
    assert jaccard(classify(lsm_map), _radius(lsm_map.mesh) < 1) >= 0.7


def test_otsu_on_two_clusters():
    v = np.concatenate([np.full(50, 1.0), np.full(50, 5.0)])
    assert 1.0 <= otsu_threshold(v) < 5.0


# -- transmission eigenvalue scan ------------------------------------------------------------------


def test_scan_rejects_zero_contrast():
    spec = GridSpec.covering(DISK, 0.1)
    with pytest.raises(DegenerateMediumError):
        te_scan(Medium(DISK, 0.0), (1, 2), 0.01, [[0, 0]], spec)


def test_scan_argument_checks():
    spec = GridSpec.covering(DISK, 0.1)
    with pytest.raises(ParameterError):
        te_scan(Medium(DISK, 1.0), (1, 2), 0.05, [[0, 0]], spec)
    with pytest.raises(ParameterError):
        te_scan(Medium(DISK, 1.0), (1, 2), 0.01, [[1.5, 0]], spec)


def test_scan_between_roots_detects_nothing():
    # oracle roots for V = 1 around here: 7.3751, 7.3967 (m = 0, 2) and 7.9844 (m = 1)
    spec = GridSpec.covering(DISK, 0.04)
    probes = [[0, 0], [0.1, 0], [0, 0.1], [-0.1, 0], [0, -0.1]]
    res = te_scan(Medium(DISK, 1.0), (7.5, 7.85), 0.02, probes, spec)
    assert res.peaks == []
