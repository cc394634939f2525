"""Exception hierarchy.

Errors fall in three families that the CLI maps to distinct exit codes:
configuration/input problems, numerical failures, and file I/O.
"""


class PulseflowError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(PulseflowError):
    exit_code = 2


class NumericError(PulseflowError):
    exit_code = 3


class DataIOError(PulseflowError):
    exit_code = 4


# -- geometry / configuration -------------------------------------------------

class InvalidInput(ConfigError, ValueError):
    pass


class DegenerateGeometry(InvalidInput):
    pass


class UnsupportedGeometry(ConfigError, TypeError):
    pass


class InvalidGrid(InvalidInput):
    pass


# -- waveform ----------------------------------------------------------------

class WaveformParseError(DataIOError, ValueError):
    pass


class NonMonotonicTime(WaveformParseError):
    pass


class TooFewSamples(WaveformParseError):
    pass


class ModesTooLarge(InvalidInput):
    pass


class DegenerateSeries(NumericError, ValueError):
    pass


class DegenerateWaveform(NumericError, ValueError):
    pass


# -- special functions / circle ------------------------------------------------

class ArgumentTooLarge(NumericError, ValueError):
    pass


class SingularTransferFunction(NumericError):
    pass


class SingularDenominator(NumericError):
    pass


# -- spectral solver / inverse map ---------------------------------------------

class SolverSingular(NumericError):
    pass


class DegenerateReference(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class VanishingDenominator(NumericError):
    pass


# -- oracle ------------------------------------------------------------------

class NotPeriodic(NumericError):
    pass
