"""Pulsatile flow in a circular pipe with prescribed flux.

Closed-form transfer between flux and pressure-gradient harmonics in terms
of the regularized confluent hypergeometric limit function 0F1~(;b;z) and
the Bessel function J0, both summed from their power series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentTooLarge, InvalidInput, SingularDenominator, SingularTransferFunction
from .inverse import PressureGradientSeries
from .stationary import poiseuille_circle

HYP_CAP = 400.0
J0_CAP = 40.0
TOL = 1e-14
MAX_TERMS = 2000

# (-1)^(3/4) on the principal branch
ROOT = np.exp(0.75j * np.pi)


def womersley_number(r, omega, nu):
    return r * math.sqrt(omega / nu)


def _power_series(z, first, ratio, tol, max_terms=MAX_TERMS):
    """Sum t_0 + t_1 + ... with t_{k+1} = t_k * ratio(k) * z, elementwise.

    Stops once every remaining term is bounded by a geometric tail below
    ``tol`` times the running sum.
    """
    z = np.asarray(z, dtype=complex)
    term = np.full(z.shape, first, dtype=complex)
    total = term.copy()
    for k in range(max_terms):
        rho = np.abs(z) * ratio(k)
        term = term * z * ratio(k)
        total = total + term
        if rho.max(initial=0.0) < 0.5:
            tail = np.abs(term) * rho / (1 - rho)
            if np.all(tail <= tol * np.maximum(np.abs(total), 1e-300)):
                return total
    raise ArgumentTooLarge("power series did not converge")


def hyp0f1_reg(b, z, tol=TOL, cap=HYP_CAP):
    """Regularized 0F1~(;b;z) = sum_k z^k / (k! (b+k-1)!) for integer b >= 1."""
    if int(b) != b or b < 1:
        raise InvalidInput("b must be a positive integer")
    b = int(b)
    z = np.asarray(z, dtype=complex)
    if np.abs(z).max(initial=0.0) > cap:
        raise ArgumentTooLarge(f"|z| exceeds {cap}; asymptotic expansions are not provided")
    out = _power_series(z, 1.0 / math.factorial(b - 1), lambda k: 1.0 / ((k + 1) * (b + k)), tol)
    return out[()] if out.ndim == 0 else out


def bessel_j0(z, tol=TOL, cap=J0_CAP):
    """J0(z) = sum_k (-1)^k (z/2)^(2k) / (k!)^2."""
    z = np.asarray(z, dtype=complex)
    if np.abs(z).max(initial=0.0) > cap:
        raise ArgumentTooLarge(f"|z| exceeds {cap}")
    w = -0.25 * z * z
    out = _power_series(w, 1.0, lambda k: 1.0 / ((k + 1) * (k + 1)), tol)
    return out[()] if out.ndim == 0 else out


def _transfer_bracket(z):
    """1 - 0F1~(;2;z)/0F1~(;1;z), without cancellation at small |z|.

    The numerator series sum_k z^k k / (k! (k+1)!) is summed directly.
    """
    f1 = hyp0f1_reg(1, z)
    # z * sum_j z^j (j+1) / ((j+1)! (j+2)!)
    diff = z * _power_series(z, 0.5, lambda j: 1.0 / ((j + 1) * (j + 3)), TOL)
    return diff / f1


def transfer_factor(R, nu, omega):
    """Flux per unit pressure-gradient harmonic at angular frequency omega > 0."""
    wo2 = R * R * omega / nu
    bracket = _transfer_bracket(0.25j * wo2)
    if abs(bracket) < 1e-300:
        raise SingularTransferFunction(f"vanishing bracket at Wo^2={wo2}")
    return math.pi * R * R * bracket / (1j * omega)


def lambda_from_flux_circle(R, nu, fw):
    if not (R > 0 and nu > 0):
        raise InvalidInput("R and nu must be positive")
    lam = np.empty(fw.M + 1, dtype=complex)
    lam[0] = poiseuille_circle(R, nu, fw.mean).lam
    for m in range(1, fw.M + 1):
        lam[m] = fw.coeffs[m] / transfer_factor(R, nu, fw.omega(m))
    return PressureGradientSeries(fw.T, lam)


def velocity_coeffs_circle(R, nu, lam_m, m, T, r):
    """Velocity harmonic w_m(r) driven by pressure-gradient harmonic lam_m."""
    if m < 1:
        raise InvalidInput("oscillatory harmonics need m >= 1; use the stationary solution for m = 0")
    r = np.asarray(r, dtype=float)
    omega = 2 * math.pi * m / T
    k = math.sqrt(omega / nu)
    den = bessel_j0(ROOT * k * R)
    if abs(den) < 1e-300:
        raise SingularDenominator(f"J0 vanishes at Wo={k * R}")
    out = (1.0 - bessel_j0(ROOT * k * r) / den) * lam_m / (1j * omega)
    out = np.where(r == R, 0.0j, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class CircleFlow:
    """Assembled pulsatile circle flow w(t, r)."""

    R: float
    nu: float
    waveform: object
    pressure: PressureGradientSeries

    def velocity(self, t, r):
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        fw = self.waveform
        steady = poiseuille_circle(self.R, self.nu, fw.mean).velocity(r, 0.0)
        out = np.broadcast_to(steady, np.broadcast(t, r).shape).astype(float)
        for m in range(1, fw.M + 1):
            wm = velocity_coeffs_circle(self.R, self.nu, self.pressure.coeffs[m], m, fw.T, r)
            out = out + 2.0 * (wm * np.exp(1j * fw.omega(m) * t)).real
        return out

    def recovered_flux(self, t, n=1025):
        from scipy.integrate import simpson

        r = np.linspace(0.0, self.R, n)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = self.velocity(t[:, None], r[None, :])
        return 2 * math.pi * simpson(w * r, x=r, axis=-1)


def solve_circle(R, nu, fw):
    return CircleFlow(float(R), float(nu), fw, lambda_from_flux_circle(R, nu, fw))
