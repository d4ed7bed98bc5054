import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spinberry import berry
from spinberry.errors import PoleSingularity, SparseContour, StepTooLarge
from spinberry.geometry import ParameterContour, SurfaceCapMesh, solid_angle

from conftest import random_spins


def wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def cap_area(theta):
    return 2 * np.pi * (1 - np.cos(theta))


# ------------------------------------------------------------ connection


@pytest.mark.parametrize("theta", [0.3, np.pi / 3, 1.2, 2.5])
def test_fd_azimuthal_component(fam, theta):
    s = np.array([np.sin(theta), 0.0, np.cos(theta)])
    v = berry.connection_fd(fam, s).value
    assert berry.azimuthal_component(v, s) == pytest.approx(np.cos(theta) / 2, abs=1e-9)


def test_fd_imaginary_residue(fam, rng):
    sample = berry.connection_fd(fam, random_spins(rng, 50))
    assert np.max(sample.imag_residue) < 1e-10


def test_fd_axial_corotation(fam, rng):
    s = random_spins(rng, 20)
    for alpha in (0.4, 1.7, -2.9):
        rot = Rotation.from_rotvec([0, 0, alpha])
        rotated = berry.connection_fd(fam, rot.apply(s)).value
        np.testing.assert_allclose(rotated, rot.apply(berry.connection_fd(fam, s).value), atol=1e-8)


def test_fd_matches_analytic(fam, rng):
    s = random_spins(rng, 100)
    fd = berry.connection_fd(fam, s)
    exact = berry.connection_spinor_analytic(s).value
    assert np.max(np.linalg.norm(fd.value - exact, axis=1)) < 1e-6
    assert np.max(fd.truncation_error) < 1e-6


def test_fd_error_is_second_order(fam):
    s = np.array([0.5, -0.3, 0.6])
    exact = berry.connection_spinor_analytic(s).value
    e1 = np.linalg.norm(berry.connection_fd(fam, s, h=4e-3, richardson=False).value - exact)
    e2 = np.linalg.norm(berry.connection_fd(fam, s, h=2e-3, richardson=False).value - exact)
    assert e1 / e2 == pytest.approx(4.0, rel=1e-2)


def test_fd_componentwise_ratio_to_analytic(fam, rng):
    s = random_spins(rng, 30)
    fd = berry.connection_fd(fam, s).value
    exact = berry.connection_spinor_analytic(s).value
    big = np.abs(exact) > 1e-3
    np.testing.assert_allclose(fd[big] / exact[big], 1.0, atol=1e-6)


def test_fd_seam_crossing(fam):
    # phi = pi is where the half-angle spinor flips sign
    s = np.array([-0.8, 1e-9, 0.6])
    fd = berry.connection_fd(fam, s).value
    np.testing.assert_allclose(fd, berry.connection_spinor_analytic(s).value, atol=1e-8)


def test_fd_step_too_large_near_axis(fam):
    with pytest.raises(StepTooLarge):
        berry.connection_fd(fam, np.array([1e-4, 0, 1.0]), h=1e-3)


def test_fd_rejects_pole(fam):
    with pytest.raises(PoleSingularity):
        berry.connection_fd(fam, np.array([0, 0, 1.0]))


def test_analytic_equator_azimuth():
    s = np.array([1.0, 0, 0])
    assert berry.azimuthal_component(berry.connection_spinor_analytic(s).value, s) == pytest.approx(0, abs=1e-15)


def test_analytic_scale_invariance(rng):
    s = random_spins(rng, 20)
    for lam in (0.1, 3.0, 250.0):
        np.testing.assert_allclose(
            berry.connection_spinor_analytic(lam * s).value, berry.connection_spinor_analytic(s).value / lam, rtol=1e-12, atol=1e-14 / lam
        )


def test_closed_form_connection_on_equator_vanishes():
    np.testing.assert_array_equal(berry.paper_connection(np.array([1.0, 0, 0])).value, 0)


def test_closed_form_connection_is_azimuthal():
    s = np.array([1.0, 0.0, 1.0]) / np.sqrt(2)
    v = berry.paper_connection(s).value
    assert np.linalg.norm(np.cross(v, [-s[1], s[0], 0])) < 1e-15
    assert v[1] > 0


@pytest.mark.parametrize("source", berry.SOURCES)
def test_tangentiality(fam, rng, source):
    s = random_spins(rng, 30)
    v = berry.connection(source, s, fam).value
    cos = np.abs(np.sum(v * s, axis=1)) / (np.linalg.norm(v, axis=1) * np.linalg.norm(s, axis=1))
    assert np.max(cos) < 1e-8


def test_analytic_is_half_of_closed_form(rng):
    s = random_spins(rng, 100)
    s = s[np.abs(s[:, 2]) > 0.1 * np.linalg.norm(s, axis=1)]
    a, p = berry.connection_spinor_analytic(s).value, berry.paper_connection(s).value
    big = np.abs(p) > 1e-3 * np.linalg.norm(p, axis=1, keepdims=True)
    np.testing.assert_allclose(a[big] / p[big], 0.5, rtol=1e-10)


def test_unknown_source(fam):
    with pytest.raises(ValueError):
        berry.connection("other", np.array([1.0, 0, 0]), fam)


# ------------------------------------------------------------- curvature


def test_monopole_curvature_north():
    np.testing.assert_allclose(berry.paper_curvature(np.array([0, 0, 1.0])), [0, 0, -1])


def test_monopole_curvature_radial(rng):
    s = rng.normal(size=(50, 3))
    f = berry.paper_curvature(s)
    assert np.max(np.linalg.norm(np.cross(f, s), axis=1) / (np.linalg.norm(f, axis=1) * np.linalg.norm(s, axis=1))) < 1e-15
    assert np.all(np.sum(f * s, axis=1) < 0)


def test_unit_monopole_flux():
    assert berry.sphere_flux("paper") == pytest.approx(-4 * np.pi, abs=1e-10)


def test_spinor_curvature_is_half_monopole(rng):
    s = random_spins(rng, 40)
    expected = -s / (2 * np.linalg.norm(s, axis=1, keepdims=True) ** 3)
    np.testing.assert_allclose(berry.spinor_curvature_analytic(s), expected, rtol=1e-9, atol=1e-12)


def test_curvature_fd_direction_and_ratio(fam, rng):
    s = random_spins(rng, 50)
    f = berry.curvature_fd(fam, s)
    sin = np.linalg.norm(np.cross(f, -s), axis=1) / (np.linalg.norm(f, axis=1) * np.linalg.norm(s, axis=1))
    assert np.max(sin) < 1e-6
    ratio = np.linalg.norm(f, axis=1) / np.linalg.norm(berry.paper_curvature(s), axis=1)
    np.testing.assert_allclose(ratio, 0.5, rtol=1e-6)


def test_curvature_rotation_covariance(fam, rng):
    s = random_spins(rng, 10, min_perp=0.3)
    rot = Rotation.from_rotvec([0.3, -0.2, 0.25])
    moved = rot.apply(s)
    keep = np.hypot(moved[:, 0], moved[:, 1]) > 0.1
    np.testing.assert_allclose(
        berry.curvature_fd(fam, moved[keep]), rot.apply(berry.curvature_fd(fam, s[keep])), rtol=1e-7, atol=1e-8
    )


def test_plaquette_chern_flux(fam):
    assert berry.sphere_plaquette_flux(fam) == pytest.approx(-2 * np.pi, abs=1e-4)


@pytest.mark.parametrize("source,expected", [("fd", -2 * np.pi), ("spinor_analytic", -2 * np.pi)])
def test_sphere_flux_per_source(fam, source, expected):
    assert berry.sphere_flux(source, fam) == pytest.approx(expected, abs=1e-4)


# ----------------------------------------------------------------- phases


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, 2.0])
def test_line_integral_closed_form_circle(theta):
    c = ParameterContour.circle(theta, 100_000)
    assert berry.phase_line_integral(None, c, "paper") == pytest.approx(2 * np.pi * np.cos(theta), abs=1e-8)


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, 2.0])
def test_line_integral_spinor_circle(theta):
    c = ParameterContour.circle(theta, 100_000)
    assert berry.phase_line_integral(None, c, "spinor_analytic") == pytest.approx(np.pi * np.cos(theta), abs=1e-8)


def test_line_integral_fd_circle(fam):
    c = ParameterContour.circle(np.pi / 3, 2000)
    assert berry.phase_line_integral(fam, c, "fd") == pytest.approx(np.pi / 2, abs=1e-5)


@pytest.mark.parametrize("source", berry.SOURCES)
def test_equator_line_integral_vanishes(fam, source):
    c = ParameterContour.circle(np.pi / 2, 2000)
    assert berry.phase_line_integral(fam, c, source) == pytest.approx(0, abs=1e-12)


def test_simpson_rule_more_accurate():
    c = ParameterContour.circle(np.pi / 3, 200)
    exact = np.pi / 2
    trap = abs(berry.phase_line_integral(None, c, "spinor_analytic") - exact)
    simp = abs(berry.phase_line_integral(None, c, "spinor_analytic", rule="simpson") - exact)
    assert simp < trap


def test_discrete_phase_cone(fam):
    c = ParameterContour.circle(np.pi / 3, 2000)
    assert berry.phase_discrete(fam, c) == pytest.approx(-np.pi / 2, abs=1e-4)


def test_discrete_phase_reversal(fam):
    c = ParameterContour.circle(np.pi / 3, 2000)
    assert wrap(berry.phase_discrete(fam, c.reversed()) + berry.phase_discrete(fam, c)) == pytest.approx(0, abs=1e-12)


def test_discrete_phase_refinement(fam):
    a = berry.phase_discrete(fam, ParameterContour.circle(np.pi / 3, 4000))
    b = berry.phase_discrete(fam, ParameterContour.circle(np.pi / 3, 8000))
    assert abs(a - b) < 1e-6


def test_discrete_phase_gauge_invariance(fam, rng):
    c = ParameterContour.circle(np.pi / 3, 2000)
    base = berry.phase_discrete(fam, c)
    for _ in range(5):
        g = rng.uniform(0, 2 * np.pi, len(c))
        assert abs(wrap(berry.phase_discrete(fam, c, gauge=g) - base)) < 1e-12


def test_discrete_phase_equals_minus_half_solid_angle(fam):
    c = ParameterContour.polygon(np.eye(3), 200, check_poles=False)
    assert berry.phase_discrete(fam, c) == pytest.approx(-solid_angle(c) / 2, abs=1e-10)


def test_sparse_contour(fam):
    with pytest.raises(SparseContour):
        berry.phase_discrete(fam, ParameterContour.circle(np.pi / 2, 8))


def test_line_and_discrete_differ_by_pi(fam):
    rep = berry.phase_report(fam, ParameterContour.circle(np.pi / 3, 2000), sources=("spinor_analytic",))
    res = rep.residuals()["discrete-line:spinor_analytic"]
    assert abs(abs(res["mod_2pi"]) - np.pi) < 1e-5


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, np.pi / 2])
def test_stokes_analytic_sources(theta):
    mesh = SurfaceCapMesh.polar_cap(theta, 2000, 40)
    hole = cap_area(1e-3)
    for source, factor in (("paper", 1.0), ("spinor_analytic", 0.5)):
        surf = berry.phase_stokes(None, mesh, source)
        assert surf == pytest.approx(-factor * (cap_area(theta) - hole), abs=1e-5)
        assert abs(berry.boundary_line_integral(None, mesh, source) - surf) < 1e-4


def test_stokes_fd_source(fam):
    mesh = SurfaceCapMesh.polar_cap(np.pi / 3, 600, 12)
    surf = berry.phase_stokes(fam, mesh, "fd")
    assert abs(berry.boundary_line_integral(fam, mesh, "fd") - surf) < 1e-4
    assert surf == pytest.approx(-np.pi / 2, abs=1e-4)


def test_degenerate_mesh_gives_zero():
    from spinberry.geometry import SurfaceCapMesh as Mesh

    verts = np.array([[1.0, 0.1, 0.2], [1.0, 0.1, 0.2], [1.0, 0.1, 0.2]])
    assert berry.phase_stokes(None, Mesh(verts, np.array([[0, 1, 2]])), "paper") == 0.0


def test_phase_report_contents(fam):
    c = ParameterContour.circle(np.pi / 3, 500)
    mesh = SurfaceCapMesh.polar_cap(np.pi / 3, 500, 8)
    rep = berry.phase_report(fam, c, mesh, sources=("paper", "spinor_analytic"))
    routes = rep.routes()
    assert {"discrete", "line:paper", "stokes:paper", "boundary:spinor_analytic"} <= set(routes)
    assert rep.ratios()["line:paper"]["gamma_over_omega"] == pytest.approx(1.0, abs=1e-3)
    assert not rep.errors
    rev = berry.phase_report(fam, c.reversed(), sources=("paper",))
    assert rev.gamma_line["paper"] == pytest.approx(-rep.gamma_line["paper"], abs=1e-12)
    assert rev.gamma_discrete == pytest.approx(-rep.gamma_discrete, abs=1e-12)


def test_phase_report_records_pole_failures(fam):
    c = ParameterContour.polygon(np.eye(3), 10, check_poles=False)
    rep = berry.phase_report(fam, c, sources=("paper", "spinor_analytic"))
    assert rep.gamma_line["spinor_analytic"] is None
    assert "line:spinor_analytic" in rep.errors
    assert rep.gamma_discrete == pytest.approx(-np.pi / 4, abs=1e-2)
