"""Collision analysis for magnetically trapped metastable neon.

The package covers the full chain from a model interatomic potential to
measured trap observables: partial-wave elastic cross sections on a
Lennard-Jones potential with a van der Waals tail, thermally averaged
relaxation cross sections, coupled loss/heating dynamics of the trapped
cloud, a direct-simulation Monte Carlo oracle of the same physics, and
least-squares / chi-square inference of scattering lengths and loss
coefficients from measurement series.
"""

from .constants import BOHR_RADIUS, HBAR, K_B
from .core import (
    IsotopeParams,
    Measurement,
    MeasurementSeries,
    ThermalState,
    TrapConfig,
    aspect_ratio,
    default_trap,
    effective_volume,
    load_measurement_series,
    mean_density,
    mean_relative_velocity,
    mean_temperature,
    neon_isotope,
)

__version__ = "0.1.0"

__all__ = [
    "BOHR_RADIUS",
    "HBAR",
    "K_B",
    "IsotopeParams",
    "Measurement",
    "MeasurementSeries",
    "ThermalState",
    "TrapConfig",
    "aspect_ratio",
    "default_trap",
    "effective_volume",
    "load_measurement_series",
    "mean_density",
    "mean_relative_velocity",
    "mean_temperature",
    "neon_isotope",
]
