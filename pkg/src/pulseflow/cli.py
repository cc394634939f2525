"""Command-line front end: ``pulseflow <subcommand> -c config.json``.

Config file (JSON; every key may be overridden by a flag)::

    {
      "geometry": {"ellipse": {"alpha": 0.25, "beta": 0.15}},
      "nu": 0.035,
      "waveform": {"path": "ica.csv", "T": 0.95},     # or {"builtin": "ica"}; optional "scale"
                                                     # or {"constant": 4.11, "T": 0.95}
      "modes": 15,                 # or "pearson_threshold": 0.999
      "m_star": 50, "mu_bar": 1e-12, "s_bar": 1e-12,
      "grid": 512, "n_cap": 64,
      "phases": [0.1, 0.3, 0.5, 0.7], "profile_points": 101,
      "output": "out/ica",
      "oracle": {"grid": [128, 128], "periods": 8, "tol": 1e-4, "steps": 1000},
      "waveforms": [{"name": "a", "path": "..."}, ...]    # sweep only
    }

Relative paths resolve against the config file's directory.  Exit codes:
0 success, 1 failed oracle check, 2 configuration, 3 numerical, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import geometry, inverse, oracle, spectral, stationary, waveform, womersley
from .errors import ConfigError, DataIOError, InvalidInput, PulseflowError, UnsupportedGeometry
from .geometry import Circle, CircularAnnulus

log = logging.getLogger("pulseflow")

STAGES = {
    "S0": "configuration",
    "S1": "waveform fit",
    "S2": "truncation",
    "S3": "pressure gradient",
    "S4": "assembly",
    "out": "output",
    "oracle": "direct oracle",
}
BUILTIN = {"ica": "ica_waveform.csv", "csf": "csf_waveform.csv"}
ORACLE_BUDGET = 0.01


class StageError(Exception):
    def __init__(self, stage, error):
        super().__init__(f"stage {stage} ({STAGES[stage]}): {error}")
        self.stage = stage
        self.exit_code = getattr(error, "exit_code", 1)


@contextmanager
def stage(name, timings=None):
    t0 = time.perf_counter()
    try:
        yield
    except PulseflowError as exc:
        raise StageError(name, exc) from exc
    except OSError as exc:
        raise StageError(name, DataIOError(str(exc))) from exc
    finally:
        if timings is not None:
            timings[name] = timings.get(name, 0.0) + time.perf_counter() - t0


# -- configuration -----------------------------------------------------------------

@dataclass
class RunConfig:
    geometry: object
    nu: float
    waveform: dict
    modes: int | None = None
    pearson_threshold: float = 1.0 - 1e-3
    m_star: int | None = None
    mu_bar: float = 1e-12
    s_bar: float = 1e-12
    grid: int = spectral.DEFAULT_GRID
    n_cap: int = 64
    phases: tuple = (0.1, 0.3, 0.5, 0.7)
    profile_points: int = 101
    lambda_samples: int = 200
    output: Path = Path("out")
    oracle: dict = field(default_factory=dict)
    waveforms: list = field(default_factory=list)
    flux: float | None = None
    base_dir: Path = Path(".")

    def __post_init__(self):
        if not (self.nu > 0 and self.mu_bar > 0 and self.s_bar > 0):
            raise InvalidInput("nu, mu_bar and s_bar must be positive")
        if not 0 < self.pearson_threshold <= 1:
            raise InvalidInput("pearson_threshold must lie in (0, 1]")
        if self.modes is not None and self.modes < 0:
            raise InvalidInput("modes must be nonnegative")
        if self.m_star is not None and self.m_star < 0:
            raise InvalidInput("m_star must be nonnegative")
        if self.profile_points < 2 or self.lambda_samples < 2:
            raise InvalidInput("profile_points and lambda_samples must be >= 2")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def load_config(args):
    raw = _read_json(args.config) if args.config else {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(args.config).resolve().parent if args.config else Path.cwd()
    over = {
        "nu": args.nu, "modes": args.modes, "pearson_threshold": args.pearson_threshold,
        "m_star": args.m_star, "mu_bar": args.mu_bar, "s_bar": args.s_bar, "grid": args.grid,
        "output": args.output, "flux": getattr(args, "flux", None),
    }
    raw.update({k: v for k, v in over.items() if v is not None})
    if args.phases is not None:
        raw["phases"] = [float(p) for p in args.phases.split(",") if p.strip()]
    if args.waveform is not None:
        raw["waveform"] = {"path": str(Path(args.waveform).resolve())}
    if args.period is not None:
        raw.setdefault("waveform", {})["T"] = args.period
    if "geometry" not in raw or "nu" not in raw:
        raise ConfigError("config needs at least 'geometry' and 'nu'")
    known = set(RunConfig.__dataclass_fields__) - {"base_dir"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    raw["geometry"] = geometry.from_dict(raw["geometry"])
    raw["output"] = base / raw.get("output", "out")
    raw.setdefault("waveform", {})
    raw["phases"] = tuple(float(p) for p in raw.get("phases", RunConfig.phases))
    try:
        return RunConfig(base_dir=base, **raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _waveform_path(spec, base):
    if "builtin" in spec:
        name = BUILTIN.get(spec["builtin"])
        if name is None:
            raise ConfigError(f"unknown builtin waveform {spec['builtin']!r}; choose from {sorted(BUILTIN)}")
        return resources.files("pulseflow") / "data" / name
    return base / spec["path"]


def load_waveform(spec, cfg):
    """Samples (or None for a constant) and the fitted series for a waveform spec."""
    T = spec.get("T")
    if "constant" in spec:
        return None, waveform.FourierWaveform.constant(float(spec["constant"]), T or 1.0), 0.0
    if "path" not in spec and "builtin" not in spec:
        raise ConfigError("waveform needs one of 'path', 'builtin' or 'constant'")
    samples = waveform.ingest_csv(_waveform_path(spec, cfg.base_dir), T)
    M = spec.get("modes", cfg.modes)
    if M is None:
        M = waveform.select_modes(samples, spec.get("pearson_threshold", cfg.pearson_threshold))
    fit = waveform.fourier_fit(samples, int(M))
    gap = waveform.pearson_gap(samples, fit) if M > 0 else 1.0
    return samples, fit.scaled(float(spec.get("scale", 1.0))), gap


# -- output helpers ------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _r(x):
    return repr(float(x))


class Result:
    """Uniform view over stationary, circle and elliptical solutions."""

    def __init__(self, kind, g, nu, fw, pressure, velocity_xy, extra=None):
        self.kind = kind
        self.geometry = g
        self.nu = nu
        self.waveform = fw
        self.pressure = pressure
        self.velocity_xy = velocity_xy
        self.extra = extra or {}


def write_profiles(path, res, phases, n):
    A = geometry.area(res.geometry)
    wbar = res.waveform.mean / A
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phase", "axis", "coordinate", "w", "w_over_wbar"])
        for phase in phases:
            for axis in ("major", "minor"):
                s, x1, x2 = geometry.semi_axis_points(res.geometry, axis, n)
                vals = np.broadcast_to(res.velocity_xy(phase * res.waveform.T, x1, x2), s.shape)
                for si, vi in zip(s, vals):
                    ratio = vi / wbar if wbar != 0 else math.nan
                    w.writerow([_r(phase), axis, _r(si), _r(vi), _r(ratio)])


def write_lambda(path, res, n):
    T = res.pressure.T
    t = T * np.arange(n) / n
    lam = res.pressure.reconstruct(t)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "lambda"])
        for ti, li in zip(t, lam):
            w.writerow([_r(ti), _r(li)])


def summary_of(res, cfg, gap):
    fw = res.waveform
    out = {
        "kind": res.kind,
        "geometry": geometry.to_dict(res.geometry),
        "nu": res.nu,
        "T": fw.T,
        "M": fw.M,
        "pearson_gap": gap,
        "flux_coeffs": [[c.real, c.imag] for c in fw.coeffs],
        "lambda_coeffs": [[c.real, c.imag] for c in res.pressure.coeffs],
    }
    try:
        out["diagnostics"] = waveform.diagnostics(fw, res.geometry, res.nu)
    except PulseflowError as exc:
        out["diagnostics"] = {"error": str(exc)}
    out.update(res.extra)
    return out


def write_outputs(res, cfg, out_dir, gap, timings, report=None, emit_contours=False):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_profiles(out_dir / "profiles.csv", res, cfg.phases, cfg.profile_points)
    write_lambda(out_dir / "lambda.csv", res, cfg.lambda_samples)
    if report is not None:
        write_json(out_dir / "truncation.json", report.to_json(tables=emit_contours))
    write_json(out_dir / "summary.json", summary_of(res, cfg, gap))
    write_json(out_dir / "timings.json", timings)
    log.info("wrote outputs to %s", out_dir)


# -- pipelines -----------------------------------------------------------------------

def _flux_roundtrip(sol, fw, n=64):
    t = fw.T * np.arange(n) / n
    f = fw.reconstruct(t)
    scale = max(np.abs(f).max(), 1e-300)
    return float(np.abs(sol.recovered_flux(t) - f).max() / scale)


def stationary_result(g, nu, f, T=1.0):
    sol = stationary.solve(g, nu, f)
    fw = waveform.FourierWaveform.constant(f, T)
    extra = {
        "lambda": sol.lam,
        "wall_shear_major": float(sol.wall_shear(0.0)),
        "wall_shear_minor": float(sol.wall_shear(math.pi / 2)),
    }
    return Result("stationary", g, nu, fw, inverse.PressureGradientSeries.constant(sol.lam, T),
                  lambda t, x1, x2: sol.velocity(x1, x2), extra)


def circle_result(g, nu, fw):
    flow = womersley.solve_circle(g.R, nu, fw)
    t = fw.T * np.arange(64) / 64
    f = fw.reconstruct(t)
    err = np.abs(flow.recovered_flux(t) - f).max() / max(np.abs(f).max(), 1e-300)
    return Result("circle", g, nu, fw, flow.pressure,
                  lambda t, x1, x2: flow.velocity(t, np.hypot(x1, x2)),
                  {"flux_roundtrip_error": float(err)})


_BASIS_CACHE = {}


def truncation(cfg, T, m_star, jobs, timings):
    key = (cfg.geometry, cfg.nu, T, m_star, cfg.mu_bar, cfg.s_bar, cfg.grid, cfg.n_cap)
    if key in _BASIS_CACHE:
        log.info("s2: cached")
        timings["S2_cached"] = True
        return _BASIS_CACHE[key]
    with stage("S2", timings):
        report = spectral.determine_nstar(
            cfg.geometry, cfg.nu, T, m_star, cfg.mu_bar, cfg.s_bar,
            J=cfg.grid, n_cap=cfg.n_cap, jobs=jobs,
        )
    timings["S2_cached"] = False
    log.info("s2: N* = %d (mu %d, s %d)", report.n_star, report.n_star_mu, report.n_star_s)
    _BASIS_CACHE[key] = report
    return report


def run_pipeline(cfg, wspec=None, jobs=1, timings=None):
    """S0-S4 for one waveform; returns (Result, fit gap, TruncationReport or None)."""
    timings = {} if timings is None else timings
    g, nu = cfg.geometry, cfg.nu
    with stage("S1", timings):
        _, fw, gap = load_waveform(cfg.waveform if wspec is None else wspec, cfg)
        m_star = fw.M if cfg.m_star is None else cfg.m_star
        if m_star < fw.M:
            raise InvalidInput(f"m_star={m_star} is below the number of fitted modes M={fw.M}")
    if fw.M == 0:
        with stage("S4", timings):
            return stationary_result(g, nu, fw.mean, fw.T), gap, None
    if isinstance(g, Circle):
        with stage("S4", timings):
            return circle_result(g, nu, fw), gap, None
    if isinstance(g, CircularAnnulus):
        raise StageError("S2", UnsupportedGeometry(
            "unsteady circular annulus is not supported; use a confocal elliptical annulus"))
    report = truncation(cfg, fw.T, m_star, jobs, timings)
    with stage("S3", timings):
        lam = inverse.lambda_from_flux(g, nu, fw, report.basis)
    with stage("S4", timings):
        sol = inverse.assemble(g, nu, fw, report.basis, lam, report.n_star)
        extra = {
            "n_star": report.n_star,
            "n_star_mu": report.n_star_mu,
            "n_star_s": report.n_star_s,
            "m_star": m_star,
            "grid": cfg.grid,
            "flux_roundtrip_error": _flux_roundtrip(sol, fw),
            "mean_speed": sol.mean_speed,
        }
    res = Result("elliptical", g, nu, fw, lam, sol.velocity_xy, extra)
    res.solution = sol
    return res, gap, report


# -- subcommands ---------------------------------------------------------------------

def cmd_stationary(cfg, args):
    timings = {}
    with stage("S1", timings):
        if cfg.flux is not None:
            f, T = float(cfg.flux), cfg.waveform.get("T", 1.0)
        else:
            _, fw, _ = load_waveform(cfg.waveform, cfg)
            f, T = fw.mean, fw.T
    with stage("S4", timings):
        res = stationary_result(cfg.geometry, cfg.nu, f, T)
    with stage("out"):
        write_outputs(res, cfg, cfg.output, 0.0, timings)
    return 0


def cmd_circle(cfg, args):
    if not isinstance(cfg.geometry, Circle):
        raise StageError("S0", ConfigError("circle-inverse needs a circle geometry"))
    return cmd_solve(cfg, args)


def cmd_solve(cfg, args):
    timings = {}
    res, gap, report = run_pipeline(cfg, jobs=args.jobs, timings=timings)
    with stage("out"):
        write_outputs(res, cfg, cfg.output, gap, timings, report, args.emit_contours)
    return 0


def cmd_sweep(cfg, args):
    if not cfg.waveforms:
        raise StageError("S0", ConfigError("sweep needs a non-empty 'waveforms' list"))
    for i, spec in enumerate(cfg.waveforms):
        name = spec.get("name", f"w{i}")
        timings = {}
        res, gap, report = run_pipeline(cfg, spec, jobs=args.jobs, timings=timings)
        with stage("out"):
            write_outputs(res, cfg, cfg.output / name, gap, timings, report, args.emit_contours)
        log.info("%s: S2 %s", name, "reused" if timings.get("S2_cached") else "computed")
    return 0


def cmd_oracle(cfg, args):
    timings = {}
    res, gap, report = run_pipeline(cfg, jobs=args.jobs, timings=timings)
    if res.kind != "elliptical":
        raise StageError("oracle", UnsupportedGeometry("oracle-check needs an unsteady elliptical run"))
    ocfg = dict(cfg.oracle)
    fw = res.waveform
    with stage("oracle", timings):
        steps = int(ocfg.get("steps", 1000))
        run = oracle.direct_solve(
            cfg.geometry, cfg.nu, res.pressure,
            grid=tuple(ocfg.get("grid", (128, 128))), dt=fw.T / steps,
            periods=int(ocfg.get("periods", oracle.DEFAULT_PERIODS)),
            tol=float(ocfg.get("tol", 1e-4)), phases=cfg.phases,
        )
        cmp = oracle.compare_profiles(run, res.solution, cfg.phases, cfg.profile_points)
        flux_err = oracle.flux_rms_error(run, fw)
    ok = flux_err < ORACLE_BUDGET and cmp["max"] < ORACLE_BUDGET
    with stage("out"):
        out = Path(cfg.output)
        write_outputs(res, cfg, out, gap, timings, report, args.emit_contours)
        oracle.write_flux_csv(run, out / "oracle_flux.csv", fw)
        oracle.write_profiles_csv(run, res.solution, cfg.phases, out / "oracle_profiles.csv",
                                  cfg.profile_points)
        write_json(out / "oracle_report.json", {
            "budget": ORACLE_BUDGET,
            "flux_rms_error": flux_err,
            "profile_max_deviation": cmp["max"],
            "profile_rms_deviation": cmp["rms"],
            "rows": cmp["rows"],
            "periods": run.periods,
            "period_change": list(run.period_change),
            "grid": [len(run.eta) - 1, len(run.theta)],
            "dt": run.dt,
            "pass": ok,
        })
    print(f"oracle-check: flux RMS {flux_err:.3e}, profile max {cmp['max']:.3e} "
          f"-> {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


COMMANDS = {
    "stationary": cmd_stationary,
    "circle-inverse": cmd_circle,
    "solve": cmd_solve,
    "oracle-check": cmd_oracle,
    "sweep": cmd_sweep,
}


def build_parser():
    p = argparse.ArgumentParser(prog="pulseflow", description="Pulsatile flow from a prescribed flow rate.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("-c", "--config", help="JSON run configuration")
        s.add_argument("-o", "--output", help="output directory")
        s.add_argument("--nu", type=float)
        s.add_argument("--waveform", help="waveform CSV (t,f)")
        s.add_argument("--period", type=float, help="waveform period T")
        s.add_argument("--modes", type=int)
        s.add_argument("--pearson-threshold", type=float)
        s.add_argument("--m-star", type=int)
        s.add_argument("--mu-bar", type=float)
        s.add_argument("--s-bar", type=float)
        s.add_argument("--grid", type=int)
        s.add_argument("--phases", help="comma-separated t/T values")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--emit-contours", action="store_true", help="full mu/s tables in truncation.json")
        if name == "stationary":
            s.add_argument("--flux", type=float, help="steady flow rate (cm^3/s)")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        try:
            cfg = load_config(args)
        except PulseflowError as exc:
            raise StageError("S0", exc) from exc
        return COMMANDS[args.command](cfg, args)
    except StageError as exc:
        print(f"pulseflow: error in {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
