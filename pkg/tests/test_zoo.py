"""Closed-form metric catalog: frozen values, domains, evolution laws."""

import math

import numpy as np
import pytest

from finslerlab import zoo
from finslerlab.errors import DomainError

X = np.array([0.5, 0.0])
Y = np.array([1.0, 0.0])


def test_frozen_values_on_the_axis():
    # chord through (0.5, 0) along +e1: forward gap 0.5, backward gap 1.5
    assert zoo.funk_ball(1)(X, Y) == pytest.approx(2.0, abs=1e-15)
    assert zoo.funk_ball(-1)(X, Y) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert zoo.klein()(X, Y) == pytest.approx(4.0 / 3.0, abs=1e-15)
    assert zoo.spherical()(X, Y) == pytest.approx(0.8, abs=1e-15)
    assert zoo.paraboloid_metric(2)(
        np.array([0.2, 1.0]), np.array([0.3, -0.4])
    ) == pytest.approx(math.sqrt(0.52**2 + 4 * 0.96 * 0.09) / (2 * 0.96),
                       abs=1e-15)


def test_hilbert_ball_is_the_klein_metric():
    # symmetrization of the two Funk metrics of the round ball
    hb, kl = zoo.hilbert_ball(), zoo.klein()
    for x, y in [(X, Y), (np.array([0.1, -0.6]), np.array([-0.3, 0.8])),
                 (np.array([-0.4, 0.2]), np.array([0.9, 0.1]))]:
        assert hb(x, y) == pytest.approx(kl(x, y), rel=1e-14)


def test_funk_reversal_swaps_sign():
    fp, fm = zoo.funk_ball(1), zoo.funk_ball(-1)
    x = np.array([0.3, -0.45])
    y = np.array([0.7, 0.55])
    assert fp(x, -y) == pytest.approx(fm(x, y), rel=1e-14)


def test_scaled_metric_value_and_constant():
    half = zoo.scaled(zoo.funk_ball(1), 0.5)
    assert half(X, Y) == pytest.approx(1.0, abs=1e-15)
    assert half.einstein_constant == pytest.approx(-1.0)
    assert zoo.funk_ball(1).einstein_constant == pytest.approx(-0.25)


def test_bryant_limit_is_the_sphere_chart():
    b1, sph = zoo.bryant(1.0), zoo.spherical()
    x = np.array([0.3, -0.2])
    y = np.array([0.4, 0.9])
    assert b1(x, y) == pytest.approx(sph(x, y), rel=1e-14)
    # interior eps stays positive and finite on a spread of states
    b = zoo.bryant(0.5)
    for x, y in [(X, Y), (np.array([-1.2, 0.7]), np.array([0.2, -1.0]))]:
        assert 0.0 < b(x, y) < np.inf


def test_bryant_eps_validation():
    with pytest.raises(DomainError):
        zoo.bryant(0.0)
    with pytest.raises(DomainError):
        zoo.bryant(1.5)


def test_domain_rejection():
    fp = zoo.funk_ball(1)
    with pytest.raises(DomainError):
        fp(np.array([1.2, 0.0]), Y)
    pb = zoo.paraboloid_metric(2)
    with pytest.raises(DomainError):
        pb(np.array([1.0, 0.5]), Y)  # below the paraboloid graph


def test_funk_general_matches_closed_form_on_the_ball():
    body = zoo.ball_body(2)
    fp = zoo.funk_ball(1)
    for x, y in [(X, Y), (np.array([0.2, 0.55]), np.array([-0.4, 0.8])),
                 (np.array([-0.7, 0.1]), np.array([0.3, 0.2]))]:
        got = zoo.funk_general(body, x, y, sign=1)
        assert got == pytest.approx(fp(x, y), rel=1e-13)


def test_funk_general_ellipse_frozen_algebraic_value():
    # chord of (x1/2)^2 + x2^2 = 1 from (0.6, -0.3) along (0.8, 0.6):
    # s = 3/26 + 5 sqrt(43)/26, so F = 1/s = (5 sqrt(43) - 3)/41
    ell = zoo.ellipsoid_body((2.0, 1.0))
    got = zoo.funk_general(ell, np.array([0.6, -0.3]), np.array([0.8, 0.6]),
                           sign=1)
    assert got == pytest.approx((5.0 * math.sqrt(43.0) - 3.0) / 41.0,
                                rel=1e-14)


def test_funk_general_scales_like_a_finsler_metric():
    ell = zoo.ellipsoid_body((2.0, 1.0))
    x = np.array([0.3, 0.4])
    y = np.array([-0.5, 0.2])
    v1 = zoo.funk_general(ell, x, y, sign=1)
    v3 = zoo.funk_general(ell, x, 3.0 * y, sign=1)
    assert v3 == pytest.approx(3.0 * v1, rel=1e-13)


def test_superellipse_catalog_entry():
    m = zoo.make_metric("hilbert-superellipse")
    assert m.name == "hilbert-superellipse-p4"
    assert m.einstein_constant == pytest.approx(-1.0)
    # regression pin for the quartic-body chord solver
    val = m(np.array([0.1, 0.2]), np.array([1.0, 0.5]))
    assert val == pytest.approx(1.0386283410687058, rel=1e-12)


def test_make_metric_rejects_unknown_names():
    with pytest.raises(DomainError):
        zoo.make_metric("not-a-metric")


def test_evolution_coefficients_frozen():
    rows = {
        "klein": (0.8660254037844386, -0.5773502691896258, -1.0),
        "spherical": (1.118033988749895, 0.4472135954999579, 1.0),
        "funk-plus": (1.0, -1.0, -1.0),
        "funk-minus": (1.7320508075688772, 0.5773502691896258, -1.0),
        "hilbert": (0.8660254037844387, -0.5773502691896257, -1.0),
    }
    for src, (a, b, lam) in rows.items():
        got = zoo.evolution_coefficients(src, X, Y)
        assert got[0] == pytest.approx(a, rel=1e-13)
        assert got[1] == pytest.approx(b, rel=1e-13)
        assert got[2] == lam


def test_evolution_law_matches_sampled_metric():
    for src in zoo.EVOLUTION_SOURCES:
        if src == "paraboloid":
            x, y = np.array([0.2, 1.0]), np.array([0.0, 1.0])
        else:
            x, y = np.array([0.15, -0.3]), np.array([0.8, 0.6])
        rep = zoo.verify_evolution(src, x, y)
        assert rep["max_rel_dev"] < 1e-10, (src, rep["max_rel_dev"])


def test_evolution_law_general_body():
    ell = zoo.ellipsoid_body((2.0, 1.0))
    rep = zoo.verify_evolution("hilbert", np.array([0.6, -0.3]),
                               np.array([0.8, 0.6]), body=ell)
    assert rep["max_rel_dev"] < 1e-8


def test_evolution_requires_unit_direction():
    with pytest.raises(DomainError):
        zoo.evolution_coefficients("klein", X, np.array([2.0, 0.0]))


def test_numeric_evolution_coefficients_agree():
    fp = zoo.funk_ball(1)
    x, y = np.array([0.15, -0.3]), np.array([0.8, 0.6])
    a, b, lam = zoo.evolution_coefficients("funk-plus", x, y)
    an, bn = zoo.numeric_evolution_coefficients(
        lambda xx, yy: 0.5 * fp.F(xx, yy), x, y)
    assert an == pytest.approx(a, rel=1e-12)
    assert bn == pytest.approx(b, rel=1e-12)
