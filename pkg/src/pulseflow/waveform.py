"""Periodic flow-rate waveforms: CSV ingestion, truncated Fourier fits and
flow diagnostics (Reynolds and Womersley numbers).

A real T-periodic signal is stored by its one-sided coefficients
``coeffs[m]`` for m = 0..M; negative indices follow from conjugate symmetry,

    f(t) = c_0 + 2 * sum_{m>=1} Re(c_m exp(i w_m t)),   w_m = 2 pi m / T.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry
from .errors import (
    DegenerateSeries,
    DegenerateWaveform,
    InvalidInput,
    ModesTooLarge,
    NonMonotonicTime,
    TooFewSamples,
    WaveformParseError,
)

log = logging.getLogger(__name__)

MIN_SAMPLES = 4


@dataclass(frozen=True)
class SampledWaveform:
    t: np.ndarray
    f: np.ndarray
    T: float

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if t.shape != f.shape or t.ndim != 1:
            raise WaveformParseError("t and f must be 1-D arrays of equal length")
        if len(t) < MIN_SAMPLES:
            raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(t)}")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(f)):
            raise WaveformParseError("non-finite sample")
        if np.any(np.diff(t) <= 0):
            raise NonMonotonicTime("sample times must be strictly increasing")
        if not self.T > 0 or t[0] < 0 or t[-1] >= self.T:
            raise WaveformParseError(f"samples must lie in [0, T) with T={self.T}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "T", float(self.T))

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class FourierWaveform:
    T: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise InvalidInput("a Fourier waveform needs at least the mean coefficient")
        if not self.T > 0:
            raise InvalidInput("period must be positive")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "T", float(self.T))

    @property
    def M(self):
        return len(self.coeffs) - 1

    @property
    def mean(self):
        return float(self.coeffs[0].real)

    def omega(self, m):
        return 2.0 * np.pi * np.asarray(m) / self.T

    def reconstruct(self, t):
        return reconstruct(self, t)

    def scaled(self, factor):
        return FourierWaveform(self.T, factor * self.coeffs)

    def truncated(self, M):
        return FourierWaveform(self.T, self.coeffs[: M + 1])

    @classmethod
    def constant(cls, value, T):
        return cls(T, [value])


def _series_sum(T, coeffs, t):
    t = np.asarray(t, dtype=float)
    m = np.arange(1, len(coeffs))
    out = np.full(t.shape, coeffs[0].real)
    if len(m):
        phase = np.exp(1j * (2 * np.pi / T) * np.multiply.outer(t, m))
        out = out + 2.0 * (phase @ coeffs[1:]).real
    return out


def reconstruct(fw, t):
    """Evaluate the real series at times ``t`` (scalar or array)."""
    return _series_sum(fw.T, fw.coeffs, t)


def ingest_csv(path, T=None):
    """Read a two-column ``t,f`` CSV (``#`` comments, optional header).

    Exact duplicate rows are dropped; any other non-increasing time step is
    rejected.  Without an explicit period, T = max(t) + median(dt).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise WaveformParseError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, row in enumerate(csv.reader(line for line in text.splitlines())):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if len(row) < 2:
            raise WaveformParseError(f"{path}:{lineno + 1}: expected two columns")
        try:
            rows.append((float(row[0]), float(row[1])))
        except ValueError:
            if rows:
                raise WaveformParseError(f"{path}:{lineno + 1}: non-numeric row {row!r}")
            continue  # header line
    if len(rows) < MIN_SAMPLES:
        raise TooFewSamples(f"{path}: need at least {MIN_SAMPLES} samples, got {len(rows)}")
    data = np.array(rows)
    t, f = data[:, 0], data[:, 1]
    dt = np.diff(t)
    dup = np.concatenate([[False], (dt == 0) & (np.diff(f) == 0)])
    t, f = t[~dup], f[~dup]
    if np.any(np.diff(t) <= 0):
        raise NonMonotonicTime(f"{path}: time column is not strictly increasing")
    if T is None:
        T = t[-1] + float(np.median(np.diff(t)))
    return SampledWaveform(t, f, T)


def _uniform_values(w):
    n = len(w)
    grid = w.T * np.arange(n) / n
    return np.interp(grid, w.t, w.f, period=w.T)


def fourier_fit(w, M):
    """Truncated discrete Fourier projection of a sampled waveform.

    Samples are first resampled onto a uniform grid of the same length by
    periodic linear interpolation (exact when already uniform from t=0).
    """
    if M < 0:
        raise InvalidInput("M must be nonnegative")
    n = len(w)
    if 2 * M + 1 > n:
        raise ModesTooLarge(f"M={M} needs at least {2 * M + 1} samples, have {n}")
    spectrum = np.fft.fft(_uniform_values(w)) / n
    c = spectrum[: M + 1].copy()
    if abs(c[0].imag) > 1e-10 * max(abs(c[0]), 1e-300):
        log.warning("discarding imaginary part %g of the mean coefficient", c[0].imag)
    c[0] = c[0].real
    return FourierWaveform(w.T, c)


def pearson(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise InvalidInput("pearson needs two 1-D series of equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(np.dot(da, da))
    sb = math.sqrt(np.dot(db, db))
    if sa == 0.0 or sb == 0.0:
        raise DegenerateSeries("zero-variance series")
    return float(np.clip(np.dot(da, db) / (sa * sb), -1.0, 1.0))


def pearson_gap(w, fw):
    """1 - r between samples and the fitted series at the sample times."""
    return 1.0 - pearson(w.f, reconstruct(fw, w.t))


def select_modes(w, threshold=1.0 - 1e-3, max_modes=None):
    """Smallest M whose fit reaches Pearson r >= threshold at the samples."""
    limit = (len(w) - 1) // 2
    if max_modes is not None:
        limit = min(limit, max_modes)
    for M in range(1, limit + 1):
        fw = fourier_fit(w, M)
        if pearson(w.f, reconstruct(fw, w.t)) >= threshold:
            return M
    raise ModesTooLarge(f"no M <= {limit} reaches Pearson threshold {threshold}")


def characteristic_frequency(fw):
    mag = np.abs(fw.coeffs)
    total = mag.sum()
    if total == 0.0:
        raise DegenerateWaveform("all Fourier coefficients vanish")
    return float(np.dot(mag, fw.omega(np.arange(len(mag)))) / total)


def diagnostics(fw, g, nu, n_time=4096):
    """Section-averaged speeds and the Reynolds/Womersley labels of a flow."""
    if not nu > 0:
        raise InvalidInput("viscosity must be positive")
    A = geometry.area(g)
    L = geometry.characteristic_length(g)
    omega_c = characteristic_frequency(fw)
    t = fw.T * np.arange(n_time) / n_time
    w_char = float(np.max(reconstruct(fw, t))) / A
    return {
        "area": A,
        "length_scale": L,
        "mean_speed": float(fw.mean / A),
        "char_speed": w_char,
        "char_frequency": omega_c,
        "reynolds": w_char * L / nu,
        "womersley": 0.5 * L * math.sqrt(omega_c / nu),
        "ellipticity": geometry.ellipticity(g),
        "eccentricity": geometry.eccentricity(g),
    }
