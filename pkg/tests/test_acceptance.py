"""Acceptance suite: one pass/fail line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, special

sys.path.insert(0, str(Path(__file__).parent))

import _cases  # noqa: E402
from pulseflow import geometry, inverse, oracle, spectral, stationary, waveform, womersley  # noqa: E402
from pulseflow.geometry import Circle, CircularAnnulus  # noqa: E402

PHASES = (0.1, 0.3, 0.5, 0.7)


def _within(x, target, tol):
    return abs(x - target) <= tol


# -- criteria --------------------------------------------------------------------

def criterion_1():
    e = geometry.ellipse_from_semiaxes(0.25, 0.15)
    an = geometry.confocal_annulus_from_semiaxes(1.11, 0.93, 0.43)
    ok = (
        _within(e.a, 0.2, 1e-12)
        and _within(e.b, 0.6931, 5e-5) and _within(e.b, 0.69, 0.005)
        and _within(an.a, 0.606, 0.005)
        and _within(an.b1, 0.66, 0.01)
        and _within(an.b2, 1.21, 0.01)
    )
    return ok, f"ellipse a={e.a:.12f} b={e.b:.6f}; annulus a={an.a:.5f} b1={an.b1:.5f} b2={an.b2:.5f}"


def _numeric_flux(sol):
    g = sol.geometry
    if isinstance(g, Circle):
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * sol.velocity(r, 0.0), 0, g.R,
                                epsabs=0, epsrel=1e-13)
        return val
    if isinstance(g, CircularAnnulus):
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * sol.velocity(r, 0.0), g.R1, g.R2,
                                epsabs=0, epsrel=1e-13)
        return val
    # Gauss-Legendre in eta, trapezoid in theta (exact for the 3 angular modes)
    lo, hi = g.eta_range
    x, w = np.polynomial.legendre.leggauss(40)
    eta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    theta = 2 * np.pi * np.arange(32) / 32
    E, TH = np.meshgrid(eta, theta, indexing="ij")
    f = sol.velocity_elliptic(E, TH) * geometry.jacobian(g, E, TH)
    return float(0.5 * (hi - lo) * np.dot(w, f.sum(axis=1)) * 2 * np.pi / 32)


def criterion_2():
    rng = np.random.default_rng(7)
    worst_map = 0.0
    for _ in range(100):
        beta = rng.uniform(0.05, 2.0)
        alpha = beta * rng.uniform(1.01, 5.0)
        nu = rng.uniform(0.005, 0.1)
        g = geometry.ellipse_from_semiaxes(alpha, beta)
        lhs = 32 * nu / (math.pi * g.a ** 4 * math.sinh(2 * g.b) ** 2 * math.tanh(2 * g.b))
        rhs = 4 * nu * (alpha ** 2 + beta ** 2) / (math.pi * alpha ** 3 * beta ** 3)
        worst_map = max(worst_map, abs(lhs / rhs - 1))
    geoms = [
        Circle(0.2), CircularAnnulus(0.1, 0.3),
        geometry.ellipse_from_semiaxes(0.25, 0.15),
        geometry.confocal_annulus_from_semiaxes(1.11, 0.93, 0.43),
    ]
    worst_flux = 0.0
    for g in geoms:
        sol = stationary.solve(g, 0.035, 4.11)
        worst_flux = max(worst_flux, abs(_numeric_flux(sol) / 4.11 - 1))
    ok = worst_map < 1e-12 and worst_flux < 1e-8
    return ok, f"lambda-map identity max rel err {worst_map:.2e}; flux quadrature max rel err {worst_flux:.2e}"


def criterion_3():
    worst = 0.0
    t0 = time.perf_counter()
    for name in ("ica", "csf"):
        g, nu = _cases.case(name)
        st = spectral.solve_modes(g, nu, _cases.T, 0, 17, J=512)
        u0, u2 = stationary.unit_modes(g, nu, st.eta)
        scale = np.abs(u0).max()
        err = max(np.abs(st.values[0] - u0).max(), np.abs(st.values[1] - u2).max(),
                  np.abs(st.values[2:]).max()) / scale
        worst = max(worst, err)
    dt = time.perf_counter() - t0
    return worst < 1e-8 and dt < 1.0, f"max rel deviation {worst:.2e} (J=512), {dt:.2f} s"


def criterion_4():
    ica, t_ica = _cases.report("ica")
    csf, t_csf = _cases.report("csf")
    ok = (
        abs(ica.n_star_mu - 17) <= 1 and abs(ica.n_star_s - 14) <= 1 and abs(ica.n_star - 17) <= 1
        and abs(csf.n_star - 17) <= 1 and max(t_ica, t_csf) <= 300
    )
    return ok, (
        f"ICA N*_mu={ica.n_star_mu} N*_s={ica.n_star_s} N*={ica.n_star} ({t_ica:.0f} s); "
        f"CSF N*_mu={csf.n_star_mu} N*_s={csf.n_star_s} N*={csf.n_star} ({t_csf:.0f} s)"
    )


def criterion_5():
    bad = []
    for name in ("ica", "csf"):
        rep, _ = _cases.report(name)
        for st in rep.basis:
            norms = st.norms()
            for k in range(rep.n_star):  # n = 2k <= 2N* - 2
                if norms[k] < norms[k + 1]:
                    bad.append((name, st.m, 2 * k))
    detail = "all pairs decreasing" if not bad else f"{len(bad)} violations, first {bad[:3]}"
    return not bad, detail


def _solution(name):
    g, nu = _cases.case(name)
    rep, _ = _cases.report(name)
    return inverse.solve(g, nu, _cases.fit(name), rep.basis, rep.n_star)


def criterion_6():
    parts, ok = [], True
    for name, gap_max in (("ica", 1e-3), ("csf", 1e-6)):
        fw = _cases.fit(name)
        gap = waveform.pearson_gap(_cases.samples(name), fw)
        sol = _solution(name)
        t = fw.T * np.arange(256) / 256
        f = fw.reconstruct(t)
        err = np.abs(sol.recovered_flux(t) - f).max() / np.abs(f).max()
        ok &= gap < gap_max and err < 1e-6
        parts.append(f"{name.upper()} gap={gap:.1e} flux err={err:.1e}")
    return ok, "; ".join(parts)


ORACLE_SETTINGS = {
    "ica": {"periods": 8},
    # slow viscous decay across the annulus gap (~2 s e-folding) needs more periods
    "csf": {"periods": 40},
}


def criterion_7():
    parts, ok = [], True
    t0 = time.perf_counter()
    for name in ("ica", "csf"):
        g, nu = _cases.case(name)
        sol = _solution(name)
        run = oracle.direct_solve(g, nu, sol.pressure, grid=(128, 128), tol=1e-4,
                                  phases=PHASES, **ORACLE_SETTINGS[name])
        flux_err = oracle.flux_rms_error(run, sol.waveform)
        cmp = oracle.compare_profiles(run, sol, PHASES)
        ok &= flux_err < 0.01 and cmp["max"] < 0.01
        parts.append(f"{name.upper()} flux RMS {flux_err:.1e}, profile max {cmp['max']:.1e} "
                     f"({run.periods} periods)")
    dt = time.perf_counter() - t0
    return ok and dt < 7200, "; ".join(parts) + f"; {dt:.0f} s"


def criterion_8():
    rng = np.random.default_rng(11)
    r = rng.uniform(0, 10, 200)
    z = r * np.exp(1j * rng.uniform(0, 2 * np.pi, 200))
    ident = np.abs(womersley.bessel_j0(z) - womersley.hyp0f1_reg(1, -z * z / 4))
    ident_ref = np.abs(womersley.bessel_j0(z) - special.jv(0, z)) / np.maximum(np.abs(special.jv(0, z)), 1)
    id_err = float(max((ident / np.maximum(np.abs(womersley.bessel_j0(z)), 1)).max(), ident_ref.max()))
    R, nu, f = 0.2, 0.035, 3.0
    omega = (1e-3 / R) ** 2 * nu
    lam = f / womersley.transfer_factor(R, nu, omega)
    steady_err = abs(lam / (8 * nu * f / (math.pi * R ** 4)) - 1)
    fw = _cases.fit("ica")
    flow = womersley.solve_circle(R, nu, fw)
    t = fw.T * np.arange(64) / 64
    ref = fw.reconstruct(t)
    rt_err = np.abs(flow.recovered_flux(t, n=4097) - ref).max() / np.abs(ref).max()
    ok = id_err < 1e-12 and steady_err < 1e-6 and rt_err < 1e-10
    return ok, f"J0/0F1 identity {id_err:.1e}; steady limit {steady_err:.1e}; flux round-trip {rt_err:.1e}"


def criterion_9():
    alpha = 0.25
    g = geometry.ellipse_from_semiaxes(alpha, 0.999 * alpha)
    nu, T = 0.035, 0.95
    fw = waveform.FourierWaveform(T, [0.0, 1.0])
    basis = spectral.solve_basis(g, nu, T, 1, 8)
    sol = inverse.solve(g, nu, fw, basis)
    centre = abs(sol.pressure.coeffs[1] * sol.mode_fields(0.0, math.pi / 2)[1])
    R = math.sqrt(alpha * 0.999 * alpha)
    lc = womersley.lambda_from_flux_circle(R, nu, fw)
    ref = abs(womersley.velocity_coeffs_circle(R, nu, lc.coeffs[1], 1, T, 0.0))
    err = abs(centre / ref - 1)
    return err < 0.01, f"centreline |u_1| {centre:.6f} vs circle {ref:.6f} (rel {err:.1e})"


CRITERIA = {
    1: ("[REGRESSION] geometry regression", criterion_1),
    2: ("[DERIVED] stationary identities", criterion_2),
    3: ("[DERIVED] steady/unsteady consistency", criterion_3),
    4: ("[REGRESSION] truncation reproduction", criterion_4),
    5: ("[REGRESSION] mode-decay monotonicity", criterion_5),
    6: ("[DERIVED] flux round-trip", criterion_6),
    7: ("[DERIVED] oracle agreement", criterion_7),
    8: ("[DERIVED] circle special functions", criterion_8),
    9: ("[DERIVED] near-circle cross-check", criterion_9),
}


def evaluate(number):
    label, fn = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"criterion {number} {label}: {'PASS' if ok else 'FAIL'} - {detail} [{time.perf_counter() - t0:.1f} s]"
    print(line)
    return ok, line


SLOW = {4, 5, 6, 7}


@pytest.mark.parametrize("number", [
    pytest.param(n, marks=pytest.mark.slow) if n in SLOW else n for n in sorted(CRITERIA)
])
def test_criterion(number, acceptance_log):
    ok, line = evaluate(number)
    acceptance_log[number] = line
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n)[0] for n in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
