"""Flux-to-pressure-gradient map and assembly of the space-time velocity.

Given unit-pressure-gradient mode stacks phi_m for m = 0..M, the flux
carried by phi_m is F(m) and the prescribed flux harmonics f_m fix the
pressure-gradient harmonics lam_m = f_m / F(m).  The velocity is then

    u(t, eta, theta) = lam_0 phi_0 + 2 Re sum_{m>=1} lam_m phi_m exp(i w_m t),
    phi_m = v_{m,0} + 2 sum_{k>=1} v_{m,2k} cos(2 k theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import geometry
from .errors import InvalidInput, UnsupportedGeometry, VanishingDenominator
from .geometry import Ellipse, EllipticalAnnulus
from .waveform import FourierWaveform, _series_sum

# one-sided fourth-order first-derivative weights, nearest node first
_D1 = np.array([25.0, -48.0, 36.0, -16.0, 3.0]) / 12.0


@dataclass(frozen=True)
class PressureGradientSeries:
    """T-periodic pressure gradient lam(t) in one-sided Fourier form."""

    T: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0 or not self.T > 0:
            raise InvalidInput("need a positive period and at least one coefficient")
        c[0] = c[0].real
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "T", float(self.T))

    @property
    def M(self):
        return len(self.coeffs) - 1

    def omega(self, m):
        return 2.0 * np.pi * np.asarray(m) / self.T

    def reconstruct(self, t):
        return _series_sum(self.T, self.coeffs, t)

    def __call__(self, t):
        return self.reconstruct(t)

    @classmethod
    def constant(cls, value, T):
        return cls(T, [value])


def flux_functional(stack):
    """Flux of the unit-gradient solution phi_m,
    F = pi a^2 int (cosh(2 eta) v_0 - v_2) d eta over the solver grid."""
    g = stack.geometry
    eta = stack.eta
    integrand = np.cosh(2 * eta) * stack.values[0] - stack.values[1]
    F = math.pi * g.a ** 2 * simpson(integrand, x=eta)
    lo, hi = g.eta_range
    scale = math.pi * g.a ** 2 * (hi - lo) * np.abs(stack.values[0]).max()
    if not abs(F) >= 1e-10 * scale:
        raise VanishingDenominator(f"flux functional vanishes for m={stack.m} (|F|={abs(F):g})")
    return complex(F)


def lambda_from_flux(g, nu, fw, stacks):
    """Pressure-gradient harmonics reproducing the flux harmonics of ``fw``."""
    if len(stacks) < fw.M + 1:
        raise InvalidInput(f"need mode stacks for m = 0..{fw.M}, have {len(stacks)}")
    lam = np.empty(fw.M + 1, dtype=complex)
    for m in range(fw.M + 1):
        st = stacks[m]
        if st.m != m or st.geometry != g or st.nu != nu or st.T != fw.T:
            raise InvalidInput(f"stack {m} does not match geometry/nu/T/m")
        lam[m] = fw.coeffs[m] / flux_functional(st)
    lam[0] = lam[0].real
    return PressureGradientSeries(fw.T, lam)


@dataclass(frozen=True)
class FlowSolution:
    geometry: object
    nu: float
    waveform: FourierWaveform
    pressure: PressureGradientSeries
    basis: tuple = field(repr=False)
    n_star: int = 0
    grid: int = 0

    def __post_init__(self):
        M = self.waveform.M
        values = np.stack([st.values for st in self.basis[: M + 1]])
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_eta", self.basis[0].eta)
        object.__setattr__(self, "_k", np.arange(values.shape[1]))

    @property
    def M(self):
        return self.waveform.M

    @property
    def T(self):
        return self.waveform.T

    # -- evaluation ------------------------------------------------------------
    def _time_weights(self, t):
        """Complex weights c_m(t) with u = Re sum_m c_m phi_m; shape (M+1, *t)."""
        t = np.asarray(t, dtype=float)
        m = np.arange(self.M + 1).reshape((-1,) + (1,) * t.ndim)
        lam = self.pressure.coeffs.reshape(m.shape)
        w = lam * np.exp(1j * (2 * np.pi / self.T) * m * t)
        w[1:] *= 2.0
        return w

    def mode_fields(self, eta, theta):
        """phi_m(eta, theta) for m = 0..M, linear in eta; shape (M+1, *shape)."""
        eta, theta = np.broadcast_arrays(np.asarray(eta, float), np.asarray(theta, float))
        grid = self._eta
        lo, hi = grid[0], grid[-1]
        tol = 1e-12 * max(1.0, hi)
        if np.any(eta < lo - tol) or np.any(eta > hi + tol):
            raise InvalidInput(f"eta outside [{lo}, {hi}]")
        x = np.clip(eta, lo, hi)
        h = grid[1] - grid[0]
        i = np.clip(((x - lo) / h).astype(int), 0, len(grid) - 2)
        w = (x - grid[i]) / h
        V = self._values[:, :, i] * (1 - w) + self._values[:, :, i + 1] * w
        c = np.cos(2 * np.multiply.outer(self._k, theta))
        c[1:] *= 2.0
        return np.einsum("mk...,k...->m...", V, c)

    def velocity(self, t, eta, theta):
        """Axial velocity u(t, eta, theta), broadcasting over all arguments."""
        t, eta, theta = np.broadcast_arrays(
            np.asarray(t, float), np.asarray(eta, float), np.asarray(theta, float)
        )
        phi = self.mode_fields(eta, theta)
        return np.einsum("m...,m...->...", self._time_weights(t), phi).real

    def velocity_xy(self, t, x1, x2):
        eta, theta = geometry.to_elliptic(self.geometry, x1, x2)
        lo, hi = self.geometry.eta_range
        # points on an inner focal segment or a wall within roundoff
        eta = np.where(np.abs(eta - lo) < 1e-12, lo, eta)
        eta = np.where(np.abs(eta - hi) < 1e-12, hi, eta)
        return self.velocity(t, eta, theta)

    def mode_flux_quadrature(self, n_theta=128):
        """int int phi_m J d eta d theta by Simpson x trapezoid quadrature."""
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        E, TH = np.meshgrid(self._eta, theta, indexing="ij")
        phi = self.mode_fields(E, TH)
        Jac = geometry.jacobian(self.geometry, E, TH)
        inner = (phi * Jac).sum(axis=-1) * (2 * np.pi / n_theta)
        return simpson(inner, x=self._eta, axis=-1)

    def recovered_flux(self, t, n_theta=128):
        """Numerical flux int int u J d eta d theta at times ``t``."""
        q = self.mode_flux_quadrature(n_theta)
        w = self._time_weights(t)
        return np.einsum("m...,m->...", w, q).real

    def wall_shear(self, theta, t, wall="outer"):
        """Signed wall shear -nu du/dn (outward normal, rho = 1)."""
        g = self.geometry
        theta = np.asarray(theta, float)
        h = self._eta[1] - self._eta[0]
        if isinstance(g, Ellipse) or wall == "outer":
            eta_w, sign = self._eta[-1], -1.0
            d = np.einsum("i,mki->mk", _D1, self._values[:, :, -1:-6:-1]) / h
        elif wall == "inner":
            eta_w, sign = self._eta[0], 1.0
            d = -np.einsum("i,mki->mk", _D1, self._values[:, :, :5]) / h
        else:
            raise InvalidInput(f"wall must be 'outer' or 'inner', got {wall!r}")
        t, theta = np.broadcast_arrays(np.asarray(t, float), theta)
        c = np.cos(2 * np.multiply.outer(self._k, theta))
        c[1:] *= 2.0
        dphi = np.einsum("mk,k...->m...", d, c)
        du = np.einsum("m...,m...->...", self._time_weights(t), dphi).real
        return sign * self.nu * du / np.sqrt(geometry.jacobian(g, eta_w, theta))

    # -- profiles ----------------------------------------------------------------
    def axis_points(self, axis, n=101):
        """Cartesian sample points along the major or minor semi-axis."""
        return geometry.semi_axis_points(self.geometry, axis, n)

    def axis_profile(self, phase, axis="major", n=101):
        """(coordinate, w) along a semi-axis at t = phase * T."""
        s, x1, x2 = self.axis_points(axis, n)
        return s, self.velocity_xy(phase * self.T, x1, x2)

    @property
    def mean_speed(self):
        """Period-averaged section speed f_0 / A."""
        return self.waveform.mean / geometry.area(self.geometry)


def assemble(g, nu, fw, stacks, lam, n_star=None):
    if not isinstance(g, (Ellipse, EllipticalAnnulus)):
        raise UnsupportedGeometry(f"{type(g).__name__} is not handled by the mode solver")
    if lam.M != fw.M or lam.T != fw.T:
        raise InvalidInput("pressure series and waveform disagree on M or T")
    stacks = tuple(stacks[: fw.M + 1])
    if len(stacks) < fw.M + 1:
        raise InvalidInput(f"need mode stacks for m = 0..{fw.M}")
    if len({(st.N, st.eta.size) for st in stacks}) != 1:
        raise InvalidInput("mode stacks must share N and the eta grid")
    N = stacks[0].N if n_star is None else n_star
    return FlowSolution(g, float(nu), fw, lam, stacks, int(N), stacks[0].eta.size - 1)


def solve(g, nu, fw, stacks, n_star=None):
    """Steps S3-S4: pressure-gradient harmonics, then the assembled field."""
    lam = lambda_from_flux(g, nu, fw, stacks)
    return assemble(g, nu, fw, stacks, lam, n_star)
