import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulseflow import geometry
from pulseflow.errors import DegenerateGeometry, InvalidInput, UnsupportedGeometry
from pulseflow.geometry import Circle, CircularAnnulus, Ellipse, EllipticalAnnulus


def test_semiaxes_inverse_of_forward_map():
    g = geometry.ellipse_from_semiaxes(math.cosh(1.0), math.sinh(1.0))
    assert g.a == pytest.approx(1.0, abs=1e-14)
    assert g.b == pytest.approx(1.0, abs=1e-14)


def test_ica_section():
    g = geometry.ellipse_from_semiaxes(0.25, 0.15)
    assert g.a == pytest.approx(0.2, abs=1e-15)
    assert g.b == pytest.approx(math.log(2.0), abs=1e-15)
    assert geometry.area(g) == pytest.approx(math.pi * 0.25 * 0.15, rel=1e-14)
    assert geometry.characteristic_length(g) == pytest.approx(0.4)
    assert geometry.ellipticity(g) == pytest.approx(0.6)
    assert geometry.eccentricity(g) == pytest.approx(0.8)


def test_csf_annulus_is_confocal():
    g = geometry.confocal_annulus_from_semiaxes(1.11, 0.93, 0.43)
    assert g.alpha2 == pytest.approx(1.11, rel=1e-14)
    assert g.beta2 == pytest.approx(0.93, rel=1e-14)
    assert g.beta1 == pytest.approx(0.43, rel=1e-14)
    assert g.alpha1 ** 2 - g.beta1 ** 2 == pytest.approx(g.a ** 2, rel=1e-13)
    # mean gap thickness
    assert geometry.characteristic_length(g) == pytest.approx(0.433483, abs=1e-6)


@pytest.mark.parametrize("alpha,beta", [(0.15, 0.25), (0.2, 0.2)])
def test_major_axis_must_be_x1(alpha, beta):
    with pytest.raises(DegenerateGeometry):
        geometry.ellipse_from_semiaxes(alpha, beta)


@pytest.mark.parametrize("args", [(1.0, 0.5, 0.6), (1.0, 0.5, -0.1)])
def test_bad_annulus(args):
    with pytest.raises(InvalidInput):
        geometry.confocal_annulus_from_semiaxes(*args)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_positive_parameters(bad):
    with pytest.raises(InvalidInput):
        Circle(bad)
    with pytest.raises(InvalidInput):
        Ellipse(1.0, bad)


def test_annulus_ordering():
    with pytest.raises(InvalidInput):
        CircularAnnulus(2.0, 1.0)
    with pytest.raises(InvalidInput):
        EllipticalAnnulus(1.0, 0.8, 0.5)


def test_circle_has_no_elliptic_coordinates():
    with pytest.raises(UnsupportedGeometry):
        geometry.jacobian(Circle(1.0), 0.5, 0.5)


def test_negative_eta_rejected():
    with pytest.raises(InvalidInput):
        geometry.to_cartesian(Ellipse(1.0, 1.0), -0.1, 0.0)


def test_jacobian_vanishes_at_foci():
    g = Ellipse(0.3, 1.0)
    assert geometry.jacobian(g, 0.0, 0.0) == 0.0
    assert geometry.jacobian(g, 0.0, math.pi) == pytest.approx(0.0, abs=1e-30)


def test_jacobian_matches_map_derivatives():
    g = Ellipse(0.7, 1.3)
    eta, theta, h = 0.6, 1.1, 1e-6
    x = lambda e, t: np.array(geometry.to_cartesian(g, e, t))  # noqa: E731
    de = (x(eta + h, theta) - x(eta - h, theta)) / (2 * h)
    dt = (x(eta, theta + h) - x(eta, theta - h)) / (2 * h)
    det = de[0] * dt[1] - de[1] * dt[0]
    assert det == pytest.approx(geometry.jacobian(g, eta, theta), rel=1e-8)


def test_area_elliptical_annulus_by_quadrature():
    g = geometry.confocal_annulus_from_semiaxes(1.11, 0.93, 0.43)
    x, w = np.polynomial.legendre.leggauss(30)
    eta = 0.5 * (g.b2 - g.b1) * x + 0.5 * (g.b1 + g.b2)
    theta = 2 * np.pi * np.arange(16) / 16
    J = geometry.jacobian(g, eta[:, None], theta[None, :])
    val = 0.5 * (g.b2 - g.b1) * np.dot(w, J.sum(axis=1)) * 2 * np.pi / 16
    assert val == pytest.approx(geometry.area(g), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.01, 3.0), st.floats(0.0, 2.5), st.floats(0.0, 2 * math.pi - 1e-9),
)
def test_coordinate_round_trip(a, eta, theta):
    g = Ellipse(a, 3.0)
    x1, x2 = geometry.to_cartesian(g, eta, theta)
    e2, t2 = geometry.to_elliptic(g, x1, x2)
    y1, y2 = geometry.to_cartesian(g, e2, t2)
    scale = a * math.cosh(eta)
    assert abs(y1 - x1) <= 1e-9 * scale and abs(y2 - x2) <= 1e-9 * scale
    assert e2 >= 0 and 0 <= t2 < 2 * math.pi


def test_semi_axis_points():
    g = geometry.ellipse_from_semiaxes(0.25, 0.15)
    s, x1, x2 = geometry.semi_axis_points(g, "minor", 5)
    assert s[-1] == pytest.approx(0.15) and np.all(x1 == 0)
    s, x1, x2 = geometry.semi_axis_points(CircularAnnulus(0.1, 0.3), "major", 3)
    assert list(s) == pytest.approx([0.1, 0.2, 0.3])
    with pytest.raises(InvalidInput):
        geometry.semi_axis_points(g, "diagonal")


@pytest.mark.parametrize("spec", [
    {"circle": {"R": 0.2}},
    {"circular_annulus": {"R1": 0.1, "R2": 0.2}},
    {"ellipse": {"a": 0.2, "b": 0.5}},
    {"elliptical_annulus": {"a": 0.6, "b1": 0.6, "b2": 1.2}},
])
def test_dict_round_trip(spec):
    g = geometry.from_dict(spec)
    assert geometry.from_dict({k: v for k, v in geometry.to_dict(g).items()}) == g


@pytest.mark.parametrize("spec", [{}, {"square": {}}, {"ellipse": {"alpha": 1.0}}, [1, 2]])
def test_bad_dict(spec):
    with pytest.raises(InvalidInput):
        geometry.from_dict(spec)
