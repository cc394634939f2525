"""Steady Poiseuille-type solutions for prescribed flux.

Each solver returns a :class:`StationarySolution` holding the pressure
gradient ``lam`` (so that -nu * Laplacian(w) = lam) and evaluators for the
axial velocity.  For elliptical sections the solution is also available in
elliptical coordinates through its three angular modes u_0, u_{+-2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import UnsupportedGeometry
from .geometry import Circle, CircularAnnulus, Ellipse, EllipticalAnnulus


# -- unit-pressure-gradient modes in elliptical coordinates --------------------

def unit_modes(g, nu, eta):
    """Angular modes (u_0, u_2) of the lam = 1 solution at ``eta``.

    u(eta, theta) = u_0(eta) + 2 u_2(eta) cos(2 theta).
    """
    geometry._require_elliptical(g)
    eta = np.asarray(eta, dtype=float)
    a2 = g.a ** 2
    if isinstance(g, Ellipse):
        b = g.b
        u0 = -a2 / (8 * nu) * (np.cosh(2 * eta) - math.cosh(2 * b))
        # -(a^2/16nu) (1 + e^{4b} - e^{2b-2eta} - e^{2b+2eta}) / (1 + e^{4b}), overflow-safe
        u2 = -a2 / (16 * nu) * (1.0 - np.cosh(2 * eta) / math.cosh(2 * b))
        return u0, u2
    if isinstance(g, EllipticalAnnulus):
        b1, b2 = g.b1, g.b2
        lin = ((eta - b1) * math.cosh(2 * b2) - (eta - b2) * math.cosh(2 * b1)) / (b2 - b1)
        u0 = a2 / (8 * nu) * (lin - np.cosh(2 * eta))
        u2 = a2 / (16 * nu) * (
            (np.sinh(2 * (eta - b1)) - np.sinh(2 * (eta - b2))) / math.sinh(2 * (b2 - b1)) - 1.0
        )
        return u0, u2
    raise UnsupportedGeometry(f"{type(g).__name__} has no elliptical modes")


def unit_modes_deta(g, nu, eta):
    """Derivatives d/d(eta) of :func:`unit_modes`."""
    geometry._require_elliptical(g)
    eta = np.asarray(eta, dtype=float)
    a2 = g.a ** 2
    if isinstance(g, Ellipse):
        d0 = -a2 / (4 * nu) * np.sinh(2 * eta)
        d2 = a2 / (8 * nu) * np.sinh(2 * eta) / math.cosh(2 * g.b)
        return d0, d2
    if isinstance(g, EllipticalAnnulus):
        b1, b2 = g.b1, g.b2
        slope = (math.cosh(2 * b2) - math.cosh(2 * b1)) / (b2 - b1)
        d0 = a2 / (8 * nu) * (slope - 2 * np.sinh(2 * eta))
        d2 = a2 / (8 * nu) * (
            (np.cosh(2 * (eta - b1)) - np.cosh(2 * (eta - b2))) / math.sinh(2 * (b2 - b1))
        )
        return d0, d2
    raise UnsupportedGeometry(f"{type(g).__name__} has no elliptical modes")


def unit_flux(g, nu):
    """Flux carried by the lam = 1 solution (closed form)."""
    if isinstance(g, Circle):
        return math.pi * g.R ** 4 / (8 * nu)
    if isinstance(g, CircularAnnulus):
        return math.pi * g.R2 ** 4 * _annulus_denominator(g) / (8 * nu)
    if isinstance(g, Ellipse):
        s = math.sinh(2 * g.b)
        return math.pi * g.a ** 4 / (32 * nu) * s * s * math.tanh(2 * g.b)
    if isinstance(g, EllipticalAnnulus):
        b1, b2 = g.b1, g.b2
        d = b2 - b1
        bracket = (
            (math.sinh(4 * b2) - math.sinh(4 * b1)) / 4
            - (math.cosh(2 * b2) - math.cosh(2 * b1)) ** 2 / (2 * d)
            - (math.cosh(2 * d) - 1) / math.sinh(2 * d)
        )
        return math.pi * g.a ** 4 / (16 * nu) * bracket
    raise UnsupportedGeometry(type(g).__name__)


def _annulus_denominator(g):
    k2 = (g.R1 / g.R2) ** 2
    return (1 - k2 * k2) + (1 - k2) ** 2 / math.log(g.R1 / g.R2)


# -- solutions -------------------------------------------------------------------

@dataclass(frozen=True)
class StationarySolution:
    geometry: object
    nu: float
    flux: float
    lam: float

    def velocity(self, x1, x2):
        """Axial velocity at Cartesian points (cm/s)."""
        g = self.geometry
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if isinstance(g, Circle):
            r2 = (x1 ** 2 + x2 ** 2) / g.R ** 2
            return 2 * self.flux / (math.pi * g.R ** 2) * (1 - r2)
        if isinstance(g, CircularAnnulus):
            r = np.hypot(x1, x2)
            k2 = (g.R1 / g.R2) ** 2
            num = (1 - (r / g.R2) ** 2) - (1 - k2) * np.log(r / g.R2) / math.log(g.R1 / g.R2)
            return 2 * self.flux / (math.pi * g.R2 ** 2) * num / _annulus_denominator(g)
        if isinstance(g, Ellipse):
            al, be = g.alpha, g.beta
            return 2 * self.flux / (math.pi * al * be) * (1 - x1 ** 2 / al ** 2 - x2 ** 2 / be ** 2)
        eta, theta = geometry.to_elliptic(g, x1, x2)
        return self.velocity_elliptic(eta, theta)

    def velocity_elliptic(self, eta, theta):
        u0, u2 = unit_modes(self.geometry, self.nu, eta)
        return self.lam * (u0 + 2 * u2 * np.cos(2 * np.asarray(theta)))

    def modes(self, eta):
        u0, u2 = unit_modes(self.geometry, self.nu, eta)
        return self.lam * u0, self.lam * u2

    def wall_shear(self, theta, wall="outer"):
        """Wall shear stress -nu du/dn (outward normal), rho = 1.

        ``theta`` is the polar angle for circular sections and the elliptical
        angle otherwise.  ``wall`` selects the boundary of an annulus.
        """
        g = self.geometry
        theta = np.asarray(theta, dtype=float)
        if isinstance(g, Circle):
            return np.full(theta.shape, 4 * self.nu * self.flux / (math.pi * g.R ** 3))
        if isinstance(g, CircularAnnulus):
            r = g.R2 if wall == "outer" else g.R1
            k2 = (g.R1 / g.R2) ** 2
            dnum = -2 * r / g.R2 ** 2 - (1 - k2) / (r * math.log(g.R1 / g.R2))
            dw = 2 * self.flux / (math.pi * g.R2 ** 2) * dnum / _annulus_denominator(g)
            sign = -1.0 if wall == "outer" else 1.0
            return np.full(theta.shape, sign * self.nu * dw)
        if isinstance(g, Ellipse):
            eta_w, sign = g.b, -1.0
        else:
            eta_w, sign = (g.b2, -1.0) if wall == "outer" else (g.b1, 1.0)
        d0, d2 = unit_modes_deta(g, self.nu, eta_w)
        du = self.lam * (d0 + 2 * d2 * np.cos(2 * theta))
        return sign * self.nu * du / np.sqrt(geometry.jacobian(g, eta_w, theta))


def _solve(g, nu, f):
    return StationarySolution(g, float(nu), float(f), float(f) / unit_flux(g, nu))


def poiseuille_circle(R, nu, f):
    return _solve(Circle(R), nu, f)


def poiseuille_circular_annulus(R1, R2, nu, f):
    return _solve(CircularAnnulus(R1, R2), nu, f)


def poiseuille_ellipse(g, nu, f):
    if not isinstance(g, Ellipse):
        raise UnsupportedGeometry("poiseuille_ellipse needs an Ellipse")
    return _solve(g, nu, f)


def poiseuille_elliptical_annulus(g, nu, f):
    if not isinstance(g, EllipticalAnnulus):
        raise UnsupportedGeometry("poiseuille_elliptical_annulus needs an EllipticalAnnulus")
    return _solve(g, nu, f)


def solve(g, nu, f):
    """Dispatch on the geometry variant."""
    return _solve(g, nu, f)
