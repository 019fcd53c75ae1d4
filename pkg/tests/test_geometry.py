"""Spray, curvature, and geodesic machinery on the closed-form catalog."""

import numpy as np
import pytest

from finslerlab import _kernels, geodesic as gd, geometry as geo, ode, zoo
from finslerlab.errors import (DegenerateFlagError, DomainError,
                               SingularMetricError)
from finslerlab.metric import FinslerMetric, FullSpace, UnitBall, dot

X = np.array([0.5, 0.0])
Y = np.array([1.0, 0.0])
XG = np.array([0.31, -0.22])
YG = np.array([0.62, 0.81])


def test_fundamental_tensor_euclidean_is_identity():
    g = geo.fundamental_tensor(zoo.euclidean(), X, np.array([0.3, 0.4]))
    assert np.allclose(g, np.eye(2), atol=1e-14)


def test_spray_closed_forms_on_the_ball():
    # klein: G = <x,y>/(1-|x|^2) y ; funk: G = (F/2) y
    kl, fp = zoo.klein(), zoo.funk_ball(1)
    for x, y in [(X, Y), (XG, YG)]:
        s = dot(x, y) / (1.0 - dot(x, x))
        assert np.allclose(geo.spray_coefficients(kl, x, y), s * y, atol=1e-12)
        f = fp(x, y)
        assert np.allclose(geo.spray_coefficients(fp, x, y), 0.5 * f * y,
                           atol=1e-12)


def test_nonlinear_connection_differentiates_the_spray():
    fp = zoo.funk_ball(1)
    N = geo.nonlinear_connection(fp, XG, YG)
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (geo.spray_coefficients(fp, XG, YG + e)
              - geo.spray_coefficients(fp, XG, YG - e)) / (2 * h)
        assert np.allclose(N[:, k], fd, atol=1e-8)


def test_riemann_annihilates_the_flag_pole():
    for m in (zoo.klein(), zoo.funk_ball(1), zoo.spherical(), zoo.bryant(0.5)):
        R = geo.riemann_curvature(m, XG, YG)
        assert np.linalg.norm(R @ YG) < 1e-10


def test_riemann_is_g_symmetric():
    m = zoo.bryant(0.5)
    F, g, R = geo.curvature_data(m, XG, YG)
    gR = g @ R
    assert np.allclose(gR, gR.T, atol=1e-10)


def test_flag_curvature_constants():
    rows = [(zoo.klein(), -1.0), (zoo.funk_ball(1), -0.25),
            (zoo.funk_ball(-1), -0.25), (zoo.spherical(), 1.0),
            (zoo.scaled(zoo.funk_ball(1), 0.5), -1.0)]
    v = np.array([-0.35, 0.92])
    for m, expect in rows:
        K = geo.flag_curvature(m, XG, YG, v)
        assert K == pytest.approx(expect, abs=1e-10)


def test_flag_rejects_degenerate_span():
    with pytest.raises(DegenerateFlagError):
        geo.flag_curvature(zoo.klein(), XG, YG, 2.5 * YG)


def test_flag_spread_is_tiny_for_constant_curvature():
    rep = geo.flag_spread(zoo.spherical(), XG, YG, flags=12)
    assert len(rep["values"]) == 12
    assert rep["spread"] < 1e-10
    assert rep["min"] == pytest.approx(1.0, abs=1e-10)


def test_einstein_residual_and_campaign():
    assert geo.einstein_residual(zoo.klein(), XG, YG) < 1e-12
    rep = geo.einstein_campaign(zoo.paraboloid_metric(2), count=15, flags=4)
    assert rep["max_einstein_residual"] < 1e-10
    assert rep["flag_min"] == pytest.approx(-1.0, abs=1e-8)
    # refuses to judge an Einstein campaign without a constant to test
    with pytest.raises(DomainError):
        geo.einstein_campaign(
            FinslerMetric(2, lambda x, y: (dot(y, y)) ** 0.5, FullSpace(2),
                          name="plain"), count=3)


def test_scaled_metric_scales_the_constant():
    half = zoo.scaled(zoo.funk_ball(1), 0.5)
    v = np.array([-0.35, 0.92])
    assert geo.flag_curvature(half, XG, YG, v) == pytest.approx(-1.0,
                                                                abs=1e-10)


def test_singular_metric_detected():
    # quartic norm: the vertical hessian of F^2 degenerates on the axes
    quartic = FinslerMetric(
        2, lambda x, y: (y[0] ** 4 + y[1] ** 4) ** 0.25, FullSpace(2),
        name="quartic")
    with pytest.raises(SingularMetricError):
        geo.fundamental_tensor(quartic, X, Y)


def test_check_minkowski_verdicts():
    assert geo.check_minkowski(zoo.euclidean(), budget=15)["passed"]
    rep = geo.check_minkowski(zoo.klein(), budget=15)
    assert rep["passed"] and rep["min_eig"] > 0.0


def test_backend_equivalence_on_curvature():
    prev = _kernels.active_backend()
    try:
        _kernels.set_backend("numpy")
        R_np = geo.riemann_curvature(zoo.funk_ball(1), XG, YG)
        _kernels.set_backend("numba")
        R_nb = geo.riemann_curvature(zoo.funk_ball(1), XG, YG)
    finally:
        _kernels.set_backend(prev)
    assert np.allclose(R_np, R_nb, rtol=1e-13, atol=1e-13)


# ---------------------------------------------------------------------------
# integrator


def test_integrator_matches_exponential_decay():
    res = ode.integrate(lambda t, u: -u, 0.0, np.array([1.0]), 5.0)
    assert res.status == "t_limit"
    assert res.u_end[0] == pytest.approx(np.exp(-5.0), rel=1e-9)


def test_integrator_guard_bisects_the_crossing():
    res = ode.integrate(lambda t, u: np.array([1.0]), 0.0, np.array([0.0]),
                        10.0, guard=lambda u: u[0] < 2.0)
    assert res.status == "boundary"
    assert res.t_end == pytest.approx(2.0, abs=1e-9)


def test_integrator_flags_blow_up():
    res = ode.integrate(lambda t, u: u * u, 0.0, np.array([1.0]), 5.0)
    assert res.status == "blow_up"
    assert res.t_end == pytest.approx(1.0, abs=1e-3)


def test_dense_output_interpolates_the_nodes():
    res = ode.integrate(lambda t, u: np.array([np.cos(t)]), 0.0,
                        np.array([0.0]), 3.0)
    ts = np.linspace(0.0, 3.0, 40)
    vals = res.sample(ts)[:, 0]
    assert np.max(np.abs(vals - np.sin(ts))) < 1e-6


# ---------------------------------------------------------------------------
# geodesics


def test_geodesics_trace_straight_chords():
    # the backward rim exit sits near t = -0.708, so this span stays interior
    run = gd.integrate_geodesic(zoo.funk_ball(1), XG, YG, (-0.5, 1.2))
    assert run.status_forward == "t_limit"
    assert run.status_backward == "t_limit"
    assert gd.hausdorff_to_chord(run.xs, XG, YG) < 1e-10
    assert run.speed_drift < 1e-8  # unit speed preserved


def test_geodesic_normalization_and_span_validation():
    run = gd.integrate_geodesic(zoo.klein(), XG, YG, (0.0, 1.0))
    assert run.speeds[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        gd.integrate_geodesic(zoo.klein(), XG, YG, (0.5, 1.0))


def test_geodesic_boundary_exit_is_localized():
    # euclidean metric restricted to the open ball: exits at |x| = 1, t = 1
    m = FinslerMetric(2, lambda x, y: dot(y, y) ** 0.5, UnitBall(2),
                      name="euclid-on-ball")
    run = gd.integrate_geodesic(m, np.zeros(2), np.array([1.0, 0.0]),
                                (0.0, 3.0))
    assert run.status_forward == "boundary"
    assert run.ts[-1] == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.norm(run.xs[-1]) == pytest.approx(1.0, abs=1e-9)


def test_funk_backward_leg_hits_the_boundary():
    # the forward funk geodesic never reaches the rim; the backward one does
    run = gd.integrate_geodesic(zoo.funk_ball(1), XG, YG, (-30.0, 1.0),
                                rtol=1e-8, atol=1e-10)
    assert run.status_forward == "t_limit"
    assert run.status_backward == "boundary"
    assert np.linalg.norm(run.xs[0]) == pytest.approx(1.0, abs=1e-6)
    assert run.t_span[0] == -30.0  # requested span is reported unchanged


def test_geodesic_sampling_matches_nodes():
    run = gd.integrate_geodesic(zoo.klein(), XG, YG, (-0.5, 0.5))
    pts, vels = run.sample(np.array([0.0]))
    assert np.allclose(pts[0], XG, atol=1e-9)
    assert vels.shape == (1, 2)
