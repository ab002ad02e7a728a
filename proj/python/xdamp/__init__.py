"""Cross damping in the hydrogen 2S-4P line shape.

Thin wrapper over the C++ core. Frequencies are rad/s unless a name says Hz.
"""

from ._core import (
    ConfigError,
    DetectionRegion,
    DoubleLorentzianFit,
    FitError,
    LevelScheme,
    LinePullingResult,
    ModelError,
    RunConfig,
    Spectrum,
    clebsch_gordan,
    fc,
    fit_double_lorentzian,
    gamma_matrix,
    jentschura_pulling,
    line_pulling,
    spectrum,
    thermal_n,
    validate,
    wigner3j,
)

__all__ = [
    "ConfigError",
    "DetectionRegion",
    "DoubleLorentzianFit",
    "FitError",
    "LevelScheme",
    "LinePullingResult",
    "ModelError",
    "RunConfig",
    "Spectrum",
    "clebsch_gordan",
    "fc",
    "fit_double_lorentzian",
    "gamma_matrix",
    "jentschura_pulling",
    "line_pulling",
    "pulling_pair",
    "spectrum",
    "thermal_n",
    "validate",
    "wigner3j",
]


def pulling_pair(scheme, config, region):
    """Cross-damping on/off spectra for one region and their fit-difference pulling."""
    on = spectrum(scheme, config, region, cross_damping=True)
    off = spectrum(scheme, config, region, cross_damping=False)
    omega0_hz = scheme.peak_splitting() / (2 * 3.141592653589793)
    return on, off, line_pulling(on, off, omega0_hz)
