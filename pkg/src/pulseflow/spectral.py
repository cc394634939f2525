"""Truncated angular-mode solver for the unit-pressure-gradient problem.

For temporal harmonic m the velocity is expanded as
sum_n v_{m,n}(eta) exp(i n theta) with only even n >= 0 kept
(v_{m,-n} = v_{m,n}).  Writing W = a^2 w_m / nu, the modes satisfy

    v_0''  - (i W/2) cosh(2 eta) v_0 + (i W/2) v_2              = -(a^2/2nu) cosh(2 eta)
    v_2n'' - ((2n)^2 + (i W/2) cosh(2 eta)) v_2n
           + (i W/4)(v_2n+2 + v_2n-2)                          = (a^2/4nu) [n == 1]

for n = 0..N, with v_2N+2 dropped.  Walls carry v = 0; the ellipse adds
v' = 0 at eta = 0 (the focal segment).

Discretization: second-order central differences on a uniform eta grid with
all N+1 modes interleaved per node, which gives one complex banded system of
half-bandwidth N+1.  The Neumann row uses the ghost value v_{-1} = v_1.  By
default the grid solution is Richardson-extrapolated from J and 2J
intervals, and each banded solve gets one step of iterative refinement with
the residual accumulated in extended precision so that modes near 1e-12 of
the leading one are not swamped by roundoff.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from .errors import (
    DegenerateReference,
    InvalidGrid,
    InvalidInput,
    NoConvergence,
    SolverSingular,
    UnsupportedGeometry,
)
from .geometry import Ellipse, EllipticalAnnulus

log = logging.getLogger(__name__)

MIN_GRID = 64
DEFAULT_GRID = 512


@dataclass(frozen=True)
class ModeStack:
    """Mode profiles v_{m,2k}(eta_j), k = 0..N, for one temporal harmonic."""

    geometry: object
    nu: float
    T: float
    m: int
    N: int
    eta: np.ndarray
    values: np.ndarray = field(repr=False)

    @property
    def womersley_sq(self):
        """a^2 w_m / nu, the squared Womersley number on the semi-focal distance."""
        return womersley_sq(self.geometry, self.nu, self.T, self.m)

    @property
    def q(self):
        return 0.25j * self.womersley_sq

    def mode(self, n):
        """Profile of angular index n (any even integer; zero beyond the cut-off)."""
        n = abs(int(n))
        if n % 2:
            return np.zeros_like(self.values[0])
        k = n // 2
        return self.values[k] if k <= self.N else np.zeros_like(self.values[0])

    def norms(self):
        """Max-norm over the grid of each kept mode."""
        return np.abs(self.values).max(axis=1)


def womersley_sq(g, nu, T, m):
    return g.a ** 2 * (2 * math.pi * m / T) / nu


def _eta_grid(g, J):
    lo, hi = g.eta_range
    return lo + (hi - lo) * np.arange(J + 1) / J


class _BandedSystem:
    """h^2-scaled coefficients of the interleaved banded operator."""

    def __init__(self, g, nu, T, m, N, J):
        self.K = K = N + 1
        self.J = J
        eta = _eta_grid(g, J)
        self.eta = eta
        h = eta[1] - eta[0]
        h2 = h * h
        W = womersley_sq(g, nu, T, m)
        c = np.cosh(2 * eta)
        k = np.arange(K)
        neumann = isinstance(g, Ellipse)

        diag = -2.0 - h2 * ((2.0 * k[None, :]) ** 2 + 0.5j * W * c[:, None])
        up_mode = np.zeros((J + 1, K), complex)
        lo_mode = np.zeros((J + 1, K), complex)
        up_mode[:, :-1] = h2 * 0.25j * W
        up_mode[:, 0] = h2 * 0.5j * W if K > 1 else 0.0
        lo_mode[:, 1:] = h2 * 0.25j * W
        up_eta = np.ones((J + 1, K))
        lo_eta = np.ones((J + 1, K))
        rhs = np.zeros((J + 1, K), complex)
        rhs[:, 0] = -h2 * g.a ** 2 / (2 * nu) * c
        if K > 1:
            rhs[:, 1] = h2 * g.a ** 2 / (4 * nu)

        lo_eta[0] = 0.0
        if neumann:
            up_eta[0] = 2.0
        dirichlet = [J] if neumann else [0, J]
        for j in dirichlet:
            diag[j] = 1.0
            up_mode[j] = lo_mode[j] = 0.0
            up_eta[j] = lo_eta[j] = 0.0
            rhs[j] = 0.0
        self.coef = (diag, up_mode, lo_mode, up_eta, lo_eta)
        self.rhs = rhs.ravel()

    def banded(self):
        """LAPACK gbtrf layout: A[i, j] -> ab[2K + i - j, j] with K extra rows."""
        K = self.K
        diag, up_mode, lo_mode, up_eta, lo_eta = (c.ravel() for c in self.coef)
        n = diag.size
        ab = np.zeros((3 * K + 1, n), complex)
        ku = K
        ab[K + ku, :] = diag
        ab[K + ku - 1, 1:] = up_mode[:-1]
        ab[K + ku + 1, :-1] = lo_mode[1:]
        ab[K, K:] = up_eta[:-K]
        ab[K + 2 * K, :-K] = lo_eta[K:]
        return ab

    def matvec(self, x, dtype=np.clongdouble):
        K = self.K
        diag, up_mode, lo_mode, up_eta, lo_eta = (c.ravel().astype(dtype) for c in self.coef)
        x = x.astype(dtype)
        y = diag * x
        y[:-1] += up_mode[:-1] * x[1:]
        y[1:] += lo_mode[1:] * x[:-1]
        y[:-K] += up_eta[:-K] * x[K:]
        y[K:] += lo_eta[K:] * x[:-K]
        return y

    def residual(self, x, dtype=np.clongdouble):
        return self.rhs.astype(dtype) - self.matvec(x, dtype)


def _solve_grid(g, nu, T, m, N, J, refine):
    system = _BandedSystem(g, nu, T, m, N, J)
    K = system.K
    lu, piv, info = lapack.zgbtrf(system.banded(), K, K)
    if info != 0:
        raise SolverSingular(f"singular banded matrix (m={m}, N={N}, J={J}, info={info})")
    x, info = lapack.zgbtrs(lu, K, K, system.rhs, piv)
    for _ in range(refine):
        r = system.residual(x)
        dx, info = lapack.zgbtrs(lu, K, K, r.astype(complex), piv)
        x = (x.astype(np.clongdouble) + dx).astype(complex)
    return system.eta, x.reshape(J + 1, K).T.copy()


def solve_modes(g, nu, T, m, N, J=DEFAULT_GRID, extrapolate=True, refine=1):
    """Solve the truncated mode system for harmonic ``m`` and cut-off ``N``.

    Negative ``m`` solves the conjugate system.  With ``extrapolate`` the
    returned values are (4 v_{2J} - v_J) / 3 on the J grid.
    """
    if not isinstance(g, (Ellipse, EllipticalAnnulus)):
        raise UnsupportedGeometry(f"{type(g).__name__} is not an elliptical section")
    if int(N) != N or N < 2:
        raise InvalidInput(f"cut-off N must be an integer >= 2, got {N}")
    if int(J) != J or J < MIN_GRID:
        raise InvalidGrid(f"need J >= {MIN_GRID} grid intervals, got {J}")
    if not (nu > 0 and T > 0):
        raise InvalidInput("nu and T must be positive")
    m, N, J = int(m), int(N), int(J)
    eta, v = _solve_grid(g, nu, T, m, N, J, refine)
    if extrapolate:
        _, fine = _solve_grid(g, nu, T, m, N, 2 * J, refine)
        v = (4.0 * fine[:, ::2] - v) / 3.0
    if m == 0:
        v = v.real.astype(complex)
    v.flags.writeable = False
    eta.flags.writeable = False
    return ModeStack(g, float(nu), float(T), m, N, eta, v)


# -- truncation control ---------------------------------------------------------

def _reference_norm(stack):
    ref = np.abs(stack.values[0]).max()
    if ref == 0.0:
        raise DegenerateReference(f"v_(m,0) vanishes identically (m={stack.m}, N={stack.N})")
    return ref


def mu_metric(stack):
    """Relative magnitude of the last kept mode, max|v_2N| / max|v_0|."""
    return float(np.abs(stack.values[stack.N]).max() / _reference_norm(stack))


def s_metric(stack_n, stack_n1):
    """Sensitivity of modes n = 0..2N-2 to raising the cut-off from N to N+1."""
    if stack_n1.N != stack_n.N + 1 or stack_n1.m != stack_n.m:
        raise InvalidInput("s_metric needs stacks for the same m with cut-offs N and N+1")
    if stack_n.eta.shape != stack_n1.eta.shape:
        raise InvalidInput("stacks must share the eta grid")
    ref = _reference_norm(stack_n)
    N = stack_n.N
    diff = np.abs(stack_n.values[:N] - stack_n1.values[:N]).max()
    return float(diff / ref)


@dataclass
class TruncationReport:
    m_star: int
    mu_bar: float
    s_bar: float
    grid: int
    mu: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    n_star_mu: int | None = None
    n_star_s: int | None = None
    basis: tuple = field(default=(), repr=False)

    @property
    def n_star(self):
        return max(self.n_star_mu, self.n_star_s)

    def to_json(self, tables=True):
        out = {
            "m_star": self.m_star,
            "mu_bar": self.mu_bar,
            "s_bar": self.s_bar,
            "grid": self.grid,
            "n_star_mu": self.n_star_mu,
            "n_star_s": self.n_star_s,
            "n_star": self.n_star,
        }
        if tables:
            Ns = sorted({N for _, N in self.mu} | {N for _, N in self.s})
            ms = list(range(self.m_star + 1))
            out["N_values"] = Ns
            out["m_values"] = ms
            out["mu"] = [[self.mu.get((m, N)) for N in Ns] for m in ms]
            out["s"] = [[self.s.get((m, N)) for N in Ns] for m in ms]
        return out


def _solve_one(args):
    return solve_modes(*args)


def _solve_all(g, nu, T, m_star, N, J, pool):
    jobs = [(g, nu, T, m, N, J) for m in range(m_star + 1)]
    if pool is None:
        return [solve_modes(*job) for job in jobs]
    return list(pool.map(_solve_one, jobs))


def determine_nstar(g, nu, T, m_star, mu_bar=1e-12, s_bar=1e-12, J=DEFAULT_GRID,
                    n_cap=64, jobs=1, n_min=2, extra=0):
    """Smallest cut-off meeting both truncation thresholds for all m <= m_star.

    N is raised from ``n_min``; the stacks at the selected cut-off are kept
    in ``report.basis`` (indexed by m).  ``extra`` additional cut-offs are
    tabulated past the selection for contour plots.
    """
    if m_star < 0 or not (mu_bar > 0 and s_bar > 0):
        raise InvalidInput("need m_star >= 0 and positive thresholds")
    report = TruncationReport(int(m_star), float(mu_bar), float(s_bar), int(J))
    pool = ProcessPoolExecutor(jobs) if jobs and jobs > 1 else None
    try:
        prev = None
        keep = {}
        N = max(2, int(n_min))
        stop_at = None
        while stop_at is None or N <= stop_at:
            if N > n_cap:
                raise NoConvergence(
                    f"thresholds mu={mu_bar:g}, s={s_bar:g} not met for N <= {n_cap}"
                )
            stacks = _solve_all(g, nu, T, m_star, N, J, pool)
            for st in stacks:
                report.mu[(st.m, N)] = mu_metric(st)
            if prev is not None:
                for a, b in zip(prev, stacks):
                    report.s[(a.m, N - 1)] = s_metric(a, b)
            if report.n_star_mu is None and max(report.mu[(m, N)] for m in range(m_star + 1)) <= mu_bar:
                report.n_star_mu = N
            if (report.n_star_s is None and prev is not None
                    and max(report.s[(m, N - 1)] for m in range(m_star + 1)) <= s_bar):
                report.n_star_s = N - 1
            keep = {k: v for k, v in keep.items() if k >= N - 1}
            keep[N] = stacks
            if stop_at is None and report.n_star_mu is not None and report.n_star_s is not None:
                report.basis = tuple(keep[report.n_star])
                stop_at = N + extra
                log.info("N* = %d (mu: %d, s: %d)", report.n_star, report.n_star_mu, report.n_star_s)
            prev = stacks
            N += 1
    finally:
        if pool is not None:
            pool.shutdown()
    return report


def solve_basis(g, nu, T, m_max, N, J=DEFAULT_GRID, jobs=1):
    """Mode stacks for m = 0..m_max at a fixed cut-off."""
    pool = ProcessPoolExecutor(jobs) if jobs and jobs > 1 else None
    try:
        return tuple(_solve_all(g, nu, T, m_max, N, J, pool))
    finally:
        if pool is not None:
            pool.shutdown()
