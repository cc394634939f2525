"""Regenerate the bundled synthetic flow-rate waveforms.

The ICA-like curve is a smooth systolic pulse plus a small dicrotic bump and
low-level measurement noise, scaled to mean 4.11 cm^3/s and peak
6.875 cm^3/s.  The CSF-like curve is a nearly sinusoidal oscillation with
mean -0.11 cm^3/s and peak 3.306 cm^3/s.  Both have period 0.95 s and 200
uniform samples.
"""

from pathlib import Path

import numpy as np

from pulseflow.waveform import FourierWaveform

T = 0.95
N = 200
OUT = Path(__file__).resolve().parents[1] / "src" / "pulseflow" / "data"


def von_mises(t, t0, kappa):
    return np.exp(kappa * (np.cos(2 * np.pi * (t - t0) / T) - 1))


def ica(t):
    rng = np.random.default_rng(2024)
    g = von_mises(t, 0.15 * T, 0.8) + 0.1 * von_mises(t, 0.45 * T, 3)
    g = (g - g.mean()) / (g.max() - g.mean())
    f = 4.11 + (6.875 - 4.11) * g + 0.002 * rng.standard_normal(len(t))
    return np.round(f - f.mean() + 4.11, 6)


def csf(t):
    c = [-0.11, 1.6 * np.exp(-0.4j), 0.04 * np.exp(1.3j), 0.01 * np.exp(2.1j),
         0.008 * np.exp(-2.5j), 0.002]
    f = FourierWaveform(T, c).reconstruct(t)
    f = -0.11 + (f + 0.11) * (3.306 + 0.11) / (f.max() + 0.11)
    return np.round(f, 8)


def write(name, t, f, note):
    with open(OUT / name, "w") as fh:
        fh.write(f"# {note}\n# period {T} s, flow rate in cm^3/s\nt,f\n")
        for ti, fi in zip(t, f):
            fh.write(f"{ti:.6f},{float(fi)!r}\n")


if __name__ == "__main__":
    t = T * np.arange(N) / N
    write("ica_waveform.csv", t, ica(t), "synthetic internal-carotid-like flow rate")
    write("csf_waveform.csv", t, csf(t), "synthetic cervical-CSF-like flow rate")
