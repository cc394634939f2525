"""Independent direct-problem solver used to validate the inverse pipeline.

Integrates J u_t - nu (u_etaeta + u_thetatheta) = J lam(t) on the
(eta, theta) rectangle with second-order finite differences and
Crank-Nicolson in time.  theta is periodic; walls carry u = 0.  For the
ellipse the row at eta = 0 uses the ghost value u(-h, theta) = u(h, -theta),
which is the continuation across the focal segment (and the Neumann
condition for theta-symmetric data).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import splu

from . import geometry
from .errors import InvalidGrid, InvalidInput, NotPeriodic, UnsupportedGeometry
from .geometry import Ellipse, EllipticalAnnulus

log = logging.getLogger(__name__)

MIN_GRID = 64
DEFAULT_PERIODS = 8


@dataclass(frozen=True)
class DirectRun:
    geometry: object
    nu: float
    T: float
    eta: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    dt: float
    periods: int
    times: np.ndarray = field(repr=False)        # final period, t in [0, T]
    flux: np.ndarray = field(repr=False)         # flux at ``times``
    flux_history: np.ndarray = field(repr=False)  # (periods, steps + 1)
    snapshots: dict = field(repr=False)           # phase -> u on (eta, theta), final period
    period_change: tuple = ()
    energy: tuple = ()
    peak: float = 0.0

    def field_at(self, phase, eta, theta):
        """Bilinear interpolation of a stored snapshot at (eta, theta)."""
        u = self.snapshots[phase]
        th = np.append(self.theta, 2 * np.pi)
        uu = np.concatenate([u, u[:, :1]], axis=1)
        interp = RegularGridInterpolator((self.eta, th), uu)
        eta, theta = np.broadcast_arrays(np.asarray(eta, float), np.mod(theta, 2 * np.pi))
        eta = np.clip(eta, self.eta[0], self.eta[-1])
        return interp(np.stack([eta, theta], axis=-1))

    def velocity_xy(self, phase, x1, x2):
        eta, theta = geometry.to_elliptic(self.geometry, x1, x2)
        return self.field_at(phase, eta, theta)


def _operator(g, n_eta, n_theta):
    """Sparse 5-point Laplacian on the interior unknowns and their eta nodes."""
    lo, hi = g.eta_range
    eta = np.linspace(lo, hi, n_eta + 1)
    h = eta[1] - eta[0]
    k = 2 * np.pi / n_theta
    ellipse = isinstance(g, Ellipse)
    rows = np.arange(0 if ellipse else 1, n_eta)   # eta indices carrying unknowns
    ne = len(rows)

    # periodic second difference in theta
    Dt = sp.diags([np.ones(n_theta - 1), -2 * np.ones(n_theta), np.ones(n_theta - 1)], [-1, 0, 1],
                  shape=(n_theta, n_theta), format="lil")
    Dt[0, -1] = Dt[-1, 0] = 1.0
    Dt = Dt.tocsr() / (k * k)
    De = sp.diags([np.ones(ne - 1), -2 * np.ones(ne), np.ones(ne - 1)], [-1, 0, 1]) / (h * h)
    L = sp.kron(De, sp.identity(n_theta)) + sp.kron(sp.identity(ne), Dt)
    if ellipse:
        # ghost u(-h, theta_n) = u(h, theta_{-n}) adds node (1, -n) to row (0, n)
        n = np.arange(n_theta)
        L = L + sp.coo_matrix(
            (np.full(n_theta, 1.0 / (h * h)), (n, n_theta + (-n) % n_theta)), shape=L.shape
        )
    return eta, rows, L.tocsc()


def _simpson_weights(x):
    n = len(x) - 1
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (x[1] - x[0]) / 3.0


def direct_solve(g, nu, lam, T=None, grid=(128, 128), dt=None, periods=DEFAULT_PERIODS,
                 tol=1e-4, phases=(), initial=None, min_periods=2):
    """Time-integrate the direct problem to a periodic state.

    ``lam`` is a PressureGradientSeries, a constant, or a callable of t (then
    ``T`` is required).  ``dt`` defaults to T/1000 and is adjusted to divide
    T.  Integration stops once the period-to-period RMS change in flux,
    relative to its peak, falls below ``tol``; ``NotPeriodic`` is raised if
    that does not happen within ``periods`` periods.  ``phases`` (t/T values)
    select snapshots stored from the final period.
    """
    if not isinstance(g, (Ellipse, EllipticalAnnulus)):
        raise UnsupportedGeometry(f"{type(g).__name__} is not supported by the oracle")
    n_eta, n_theta = (int(v) for v in grid)
    if n_eta < MIN_GRID or n_theta < MIN_GRID or n_eta % 2 or n_theta % 2:
        raise InvalidGrid(f"oracle grid must be even and >= {MIN_GRID} in both directions, got {grid}")
    if not nu > 0:
        raise InvalidInput("nu must be positive")
    if callable(lam):
        T = getattr(lam, "T", T)
        lam_fn = lam
    else:
        value = float(lam)
        lam_fn = lambda t: np.full(np.shape(t), value)  # noqa: E731
    if T is None or not T > 0:
        raise InvalidInput("a positive period T is required")
    T = float(T)
    steps = max(1, round(T / (dt if dt else T / 1000)))
    dt = T / steps
    if periods < 1:
        raise InvalidInput("periods must be >= 1")

    eta, rows, L = _operator(g, n_eta, n_theta)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    Jac = geometry.jacobian(g, eta[rows][:, None], theta[None, :]).ravel()
    Jd = sp.diags(Jac)
    lhs = splu((Jd / dt - 0.5 * nu * L).tocsc())
    rhs_op = (Jd / dt + 0.5 * nu * L).tocsr()

    u = np.zeros(len(Jac)) if initial is None else np.asarray(initial, float).ravel().copy()
    if u.shape != Jac.shape:
        raise InvalidInput("initial field has the wrong shape")
    full = np.zeros((n_eta + 1, n_theta))
    # flux = int int u J d eta d theta: Simpson in eta, trapezoid in theta
    qw = (_simpson_weights(eta)[rows][:, None] * np.full(n_theta, 2 * np.pi / n_theta)).ravel() * Jac
    snap_steps = {float(p): int(round((p % 1.0) * steps)) for p in phases}

    def expand(v):
        full[rows] = v.reshape(len(rows), n_theta)
        return full

    history, changes, energy = [], [], []
    times = np.arange(steps + 1) * dt
    lam_vals = np.asarray(lam_fn(times), float)
    for p in range(periods):
        flux = np.empty(steps + 1)
        snaps = {}
        peak = 0.0
        e_acc = 0.0
        flux[0] = qw @ u
        for n in range(steps + 1):
            if n > 0:
                b = rhs_op @ u + Jac * (0.5 * (lam_vals[n - 1] + lam_vals[n]))
                u = lhs.solve(b)
                flux[n] = qw @ u
            for phase, s in snap_steps.items():
                if s == n:
                    snaps[phase] = expand(u).copy()
            peak = max(peak, float(np.abs(u).max()))
            if n < steps:
                e_acc += float(qw @ (u * u))
        history.append(flux)
        energy.append(e_acc / steps)
        if p > 0:
            scale = max(np.abs(flux).max(), 1e-300)
            change = float(np.sqrt(np.mean((flux - history[-2]) ** 2)) / scale)
            changes.append(change)
            log.info("period %d: flux change %.3e", p + 1, change)
            if change < tol and p + 1 >= min_periods:
                break
        elif periods == 1:
            break
    else:
        if periods > 1:
            raise NotPeriodic(
                f"flux not periodic to {tol:g} after {periods} periods (last change {changes[-1]:.3e})"
            )
    return DirectRun(
        g, float(nu), T, eta, theta, dt, len(history), times, history[-1],
        np.array(history), snaps, tuple(changes), tuple(energy), peak,
    )


def flux_rms_error(run, fw):
    """RMS of (oracle flux - prescribed flux) over the final period, relative to RMS(f)."""
    f = fw.reconstruct(run.times[:-1])
    diff = run.flux[:-1] - f
    return float(np.sqrt(np.mean(diff ** 2)) / np.sqrt(np.mean(f ** 2)))


def compare_profiles(run, sol, phases, n=101):
    """Deviation between an oracle run and an assembled solution along both semi-axes.

    Errors are reported relative to the oracle's peak |u| over the final
    period (``max``/``rms``) and to the peak on the sampled axes at the same
    phase (``max_local``).
    """
    if run.geometry != sol.geometry or run.nu != sol.nu:
        raise InvalidInput("run and solution differ in geometry or viscosity")
    peak = run.peak if run.peak > 0 else 1.0
    rows = []
    for phase in phases:
        if phase not in run.snapshots:
            raise InvalidInput(f"no oracle snapshot at phase {phase}")
        for axis in ("major", "minor"):
            s, x1, x2 = sol.axis_points(axis, n)
            w_sol = sol.velocity_xy(phase * sol.T, x1, x2)
            w_orc = run.velocity_xy(phase, x1, x2)
            d = np.abs(w_sol - w_orc)
            local = max(np.abs(w_orc).max(), 1e-300)
            rows.append({
                "phase": phase, "axis": axis,
                "max": float(d.max() / peak),
                "rms": float(np.sqrt(np.mean(d ** 2)) / peak),
                "max_local": float(d.max() / local),
            })
    return {
        "rows": rows,
        "max": max(r["max"] for r in rows) if rows else 0.0,
        "rms": max(r["rms"] for r in rows) if rows else 0.0,
        "peak": peak,
    }


def write_flux_csv(run, path, fw=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "flux_oracle"] + (["flux_prescribed"] if fw is not None else []))
        ref = fw.reconstruct(run.times) if fw is not None else None
        for i, t in enumerate(run.times):
            row = [repr(float(t)), repr(float(run.flux[i]))]
            if ref is not None:
                row.append(repr(float(ref[i])))
            w.writerow(row)


def write_profiles_csv(run, sol, phases, path, n=101):
    """Oracle and inverse profiles side by side along both semi-axes."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phase", "axis", "coordinate", "w_inverse", "w_oracle"])
        for phase in phases:
            for axis in ("major", "minor"):
                s, x1, x2 = sol.axis_points(axis, n)
                a = sol.velocity_xy(phase * sol.T, x1, x2)
                b = run.velocity_xy(phase, x1, x2)
                for i in range(len(s)):
                    w.writerow([repr(float(phase)), axis, repr(float(s[i])),
                                repr(float(a[i])), repr(float(b[i]))])

