"""Cross-section geometries and the elliptical coordinate map.

Elliptical coordinates (eta, theta) are defined by

    x1 = a cosh(eta) cos(theta),   x2 = a sinh(eta) sin(theta)

so the ellipse with semi-axes alpha > beta is the curve eta = b with
alpha = a cosh(b), beta = a sinh(b).  Confocal ellipses share ``a``.
All lengths are in cm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateGeometry, InvalidInput, UnsupportedGeometry


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Circle:
    R: float

    def __post_init__(self):
        object.__setattr__(self, "R", _positive("R", self.R))

    @property
    def kind(self):
        return "circle"


@dataclass(frozen=True)
class CircularAnnulus:
    R1: float
    R2: float

    def __post_init__(self):
        object.__setattr__(self, "R1", _positive("R1", self.R1))
        object.__setattr__(self, "R2", _positive("R2", self.R2))
        if not self.R1 < self.R2:
            raise InvalidInput(f"need R1 < R2, got R1={self.R1}, R2={self.R2}")

    @property
    def kind(self):
        return "circular_annulus"


@dataclass(frozen=True)
class Ellipse:
    """Ellipse of semi-focal distance ``a`` and elliptical radius ``b``."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    @property
    def kind(self):
        return "ellipse"

    @property
    def alpha(self):
        return self.a * math.cosh(self.b)

    @property
    def beta(self):
        return self.a * math.sinh(self.b)

    @property
    def eta_range(self):
        return 0.0, self.b


@dataclass(frozen=True)
class EllipticalAnnulus:
    """Region between the confocal ellipses eta = b1 and eta = b2."""

    a: float
    b1: float
    b2: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b1", _positive("b1", self.b1))
        object.__setattr__(self, "b2", _positive("b2", self.b2))
        if not self.b1 < self.b2:
            raise InvalidInput(f"need b1 < b2, got b1={self.b1}, b2={self.b2}")

    @property
    def kind(self):
        return "elliptical_annulus"

    @property
    def alpha1(self):
        return self.a * math.cosh(self.b1)

    @property
    def beta1(self):
        return self.a * math.sinh(self.b1)

    @property
    def alpha2(self):
        return self.a * math.cosh(self.b2)

    @property
    def beta2(self):
        return self.a * math.sinh(self.b2)

    @property
    def eta_range(self):
        return self.b1, self.b2


SectionGeometry = Union[Circle, CircularAnnulus, Ellipse, EllipticalAnnulus]
ELLIPTICAL = (Ellipse, EllipticalAnnulus)


def ellipse_from_semiaxes(alpha, beta):
    """Build an :class:`Ellipse` from its major and minor semi-axes."""
    alpha = _positive("alpha", alpha)
    beta = _positive("beta", beta)
    if alpha <= beta:
        raise DegenerateGeometry(
            f"alpha must exceed beta (major axis along x1); got alpha={alpha}, beta={beta}"
        )
    a = math.sqrt((alpha - beta) * (alpha + beta))
    b = math.log((alpha + beta) / a)
    return Ellipse(a, b)


def confocal_annulus_from_semiaxes(alpha2, beta2, beta1):
    """Annulus between an outer ellipse (alpha2, beta2) and the confocal
    inner ellipse whose minor semi-axis is ``beta1``."""
    alpha2 = _positive("alpha2", alpha2)
    beta2 = _positive("beta2", beta2)
    beta1 = _positive("beta1", beta1)
    if alpha2 <= beta2:
        raise DegenerateGeometry(f"alpha2 must exceed beta2; got {alpha2}, {beta2}")
    if beta1 >= beta2:
        raise InvalidInput(f"confocal inner ellipse needs beta1 < beta2; got {beta1}, {beta2}")
    a = math.sqrt((alpha2 - beta2) * (alpha2 + beta2))
    alpha1 = math.hypot(a, beta1)
    b1 = math.log((alpha1 + beta1) / a)
    b2 = math.log((alpha2 + beta2) / a)
    return EllipticalAnnulus(a, b1, b2)


def _require_elliptical(g):
    if not isinstance(g, ELLIPTICAL):
        raise UnsupportedGeometry(
            f"{type(g).__name__} has no elliptical coordinates"
        )


def to_cartesian(g, eta, theta):
    _require_elliptical(g)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise InvalidInput("eta must be nonnegative")
    x1 = g.a * np.cosh(eta) * np.cos(theta)
    x2 = g.a * np.sinh(eta) * np.sin(theta)
    return x1, x2


def to_elliptic(g, x1, x2):
    """Inverse of :func:`to_cartesian`, with eta >= 0 and theta in [0, 2 pi)."""
    _require_elliptical(g)
    z = np.arccosh((np.asarray(x1, dtype=float) + 1j * np.asarray(x2, dtype=float)) / g.a)
    # principal branch already has Re(z) >= 0
    return z.real, np.mod(z.imag, 2 * np.pi)


def jacobian(g, eta, theta):
    _require_elliptical(g)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise InvalidInput("eta must be nonnegative")
    return g.a ** 2 * (np.sinh(eta) ** 2 + np.sin(theta) ** 2)


def area(g):
    if isinstance(g, Circle):
        return math.pi * g.R ** 2
    if isinstance(g, CircularAnnulus):
        return math.pi * (g.R2 ** 2 - g.R1 ** 2)
    if isinstance(g, Ellipse):
        return math.pi * g.alpha * g.beta
    if isinstance(g, EllipticalAnnulus):
        return math.pi * (g.alpha2 * g.beta2 - g.alpha1 * g.beta1)
    raise UnsupportedGeometry(type(g).__name__)


def characteristic_length(g):
    """Diameter-like scale used for Reynolds and Womersley numbers.

    Simply connected sections use the sum of the semi-axes; annuli use the
    mean gap thickness.
    """
    if isinstance(g, Circle):
        return 2.0 * g.R
    if isinstance(g, CircularAnnulus):
        return g.R2 - g.R1
    if isinstance(g, Ellipse):
        return g.alpha + g.beta
    if isinstance(g, EllipticalAnnulus):
        return 0.5 * (g.alpha2 - g.alpha1 + g.beta2 - g.beta1)
    raise UnsupportedGeometry(type(g).__name__)


def semiaxes(g):
    """Outer (alpha, beta) pair; equal for circular sections."""
    if isinstance(g, Circle):
        return g.R, g.R
    if isinstance(g, CircularAnnulus):
        return g.R2, g.R2
    if isinstance(g, Ellipse):
        return g.alpha, g.beta
    return g.alpha2, g.beta2


def semi_axis_points(g, axis, n=101):
    """Cartesian samples along the major (x1) or minor (x2) semi-axis.

    Returns (s, x1, x2) with s the distance from the centre; annuli are
    sampled across the gap only.
    """
    if axis not in ("major", "minor"):
        raise InvalidInput(f"axis must be 'major' or 'minor', got {axis!r}")
    if isinstance(g, Circle):
        lo, hi = 0.0, g.R
    elif isinstance(g, CircularAnnulus):
        lo, hi = g.R1, g.R2
    elif isinstance(g, Ellipse):
        lo, hi = 0.0, (g.alpha if axis == "major" else g.beta)
    elif isinstance(g, EllipticalAnnulus):
        lo, hi = (g.alpha1, g.alpha2) if axis == "major" else (g.beta1, g.beta2)
    else:
        raise UnsupportedGeometry(type(g).__name__)
    s = np.linspace(lo, hi, n)
    zero = np.zeros_like(s)
    return (s, s, zero) if axis == "major" else (s, zero, s)


def ellipticity(g):
    """Axis ratio beta/alpha of the outer boundary (1 for circles)."""
    alpha, beta = semiaxes(g)
    return beta / alpha


def eccentricity(g):
    """Conic eccentricity sqrt(1 - (beta/alpha)^2) of the outer boundary."""
    return math.sqrt(max(0.0, 1.0 - ellipticity(g) ** 2))


def from_dict(spec):
    """Parse the config-file geometry block.

    Accepted forms (exactly one key)::

        {"circle": {"R": ...}}
        {"circular_annulus": {"R1": ..., "R2": ...}}
        {"ellipse": {"alpha": ..., "beta": ...}}       or {"a": ..., "b": ...}
        {"elliptical_annulus": {"alpha2": ..., "beta2": ..., "beta1": ...}}
                                                       or {"a": ..., "b1": ..., "b2": ...}

    When both forms are given the (a, b) parameters win.
    """
    if not isinstance(spec, dict) or len(spec) != 1:
        raise InvalidInput(f"geometry must be a one-key mapping, got {spec!r}")
    (kind, params), = spec.items()
    try:
        if kind == "circle":
            return Circle(params["R"])
        if kind == "circular_annulus":
            return CircularAnnulus(params["R1"], params["R2"])
        if kind == "ellipse":
            if "a" in params:
                return Ellipse(params["a"], params["b"])
            return ellipse_from_semiaxes(params["alpha"], params["beta"])
        if kind == "elliptical_annulus":
            if "a" in params:
                return EllipticalAnnulus(params["a"], params["b1"], params["b2"])
            return confocal_annulus_from_semiaxes(
                params["alpha2"], params["beta2"], params["beta1"]
            )
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed {kind} geometry: {params!r}") from exc
    raise InvalidInput(f"unknown geometry kind {kind!r}")


def to_dict(g):
    if isinstance(g, Circle):
        return {"circle": {"R": g.R}}
    if isinstance(g, CircularAnnulus):
        return {"circular_annulus": {"R1": g.R1, "R2": g.R2}}
    if isinstance(g, Ellipse):
        return {"ellipse": {"a": g.a, "b": g.b, "alpha": g.alpha, "beta": g.beta}}
    return {
        "elliptical_annulus": {
            "a": g.a, "b1": g.b1, "b2": g.b2,
            "alpha1": g.alpha1, "beta1": g.beta1,
            "alpha2": g.alpha2, "beta2": g.beta2,
        }
    }
