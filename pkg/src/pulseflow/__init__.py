"""Fully-developed pulsatile flow in circular, elliptical and confocal
elliptical-annulus sections from a prescribed periodic flow rate."""

from .errors import PulseflowError
from .geometry import (
    Circle,
    CircularAnnulus,
    Ellipse,
    EllipticalAnnulus,
    confocal_annulus_from_semiaxes,
    ellipse_from_semiaxes,
)
from .inverse import FlowSolution, PressureGradientSeries, assemble, lambda_from_flux, solve
from .spectral import ModeStack, TruncationReport, determine_nstar, solve_modes
from .waveform import FourierWaveform, SampledWaveform, fourier_fit, ingest_csv

__version__ = "0.1.0"

__all__ = [
    "Circle", "CircularAnnulus", "Ellipse", "EllipticalAnnulus",
    "ellipse_from_semiaxes", "confocal_annulus_from_semiaxes",
    "FourierWaveform", "SampledWaveform", "fourier_fit", "ingest_csv",
    "ModeStack", "TruncationReport", "solve_modes", "determine_nstar",
    "FlowSolution", "PressureGradientSeries", "lambda_from_flux", "assemble", "solve",
    "PulseflowError",
]
