"""Thermal averaging of elastic cross sections into relaxation cross sections.

Cross-dimensional relaxation in a harmonic trap proceeds at the rate
gamma_rel = sigma_rel * nbar * vbar, which defines an effective cross
section sigma_rel(a, T).  Collisions with high relative speed drive the
relaxation harder than the flux average suggests, so sigma_rel is a
weighted mean of sigma_el(v) over the Maxwell-Boltzmann distribution of
relative speeds with an extra power of v in the weight, scaled by the
mean number of collisions an atom needs to rethermalize.

Kernel calibration against the particle simulation (see docs/kernel.md
and scripts/calibrate_kernel.py): weight exponent p = 5, matching the
viscosity-type collision bracket (x^7 exp(-x^2) dx) that governs the
decay of a velocity-space quadrupole, and rate factor 1/2.7, the
rethermalization collision number for an energy-independent cross
section.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.special import gammainc
from scipy.special import gamma as gamma_fn

from .constants import HBAR, K_B
from .core import IsotopeParams
from .potential import DEFAULT_BRANCH, ModelPotential, tune_to_scattering_length
from .scattering import (
    DEFAULT_L_MAX,
    DEFAULT_V_GRID,
    CrossSectionCurve,
    cross_section_curve,
)

RELAXATION_POWER: float = 5.0
RETHERMALIZATION_COLLISIONS: float = 2.7
_COVERAGE_TOL: float = 1.0e-3
_QUAD_REL_TOL: float = 1.0e-6

DEFAULT_T_GRID: np.ndarray = np.linspace(100.0e-6, 800.0e-6, 29)


@dataclass(frozen=True)
class AverageKernel:
    """Weight specification for thermal averages over relative speeds.

    The weight is v^(2+p) * exp(-(v/v_T)^2) with v_T = sqrt(2 k_B T / mu),
    i.e. the Maxwell-Boltzmann speed distribution times v^p.  The average
    is normalized (a constant cross section averages to itself) and then
    scaled by ``rate_factor``.
    """

    p: float
    rate_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.p < 0.0:
            raise ValueError("weight exponent p must be nonnegative")
        if self.rate_factor <= 0.0:
            raise ValueError("rate_factor must be positive")


def flux_kernel() -> AverageKernel:
    """Standard flux average <sigma v> / vbar."""
    return AverageKernel(p=1.0, rate_factor=1.0)


def relaxation_kernel() -> AverageKernel:
    """Relaxation average calibrated against the particle simulation."""
    return AverageKernel(
        p=RELAXATION_POWER, rate_factor=1.0 / RETHERMALIZATION_COLLISIONS
    )


def thermal_speed(isotope: IsotopeParams, temperature: float) -> float:
    """Most probable relative speed sqrt(2 k_B T / mu), m/s."""
    return math.sqrt(2.0 * K_B * temperature / isotope.reduced_mass)


def thermal_average(
    curve: CrossSectionCurve,
    isotope: IsotopeParams,
    temperature: float,
    kernel: AverageKernel,
) -> float:
    """Kernel-weighted mean of sigma_el over relative speeds at T, m^2.

    Raises ValueError if the curve's speed grid misses more than 1e-3 of
    the weight mass at this temperature.
    """
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    vt = thermal_speed(isotope, temperature)
    x_lo = curve.v[0] / vt
    x_hi = curve.v[-1] / vt
    shape = 0.5 * (3.0 + kernel.p)
    inside = gammainc(shape, x_hi**2) - gammainc(shape, x_lo**2)
    if 1.0 - inside > _COVERAGE_TOL:
        raise ValueError(
            f"speed grid [{curve.v[0]:.3g}, {curve.v[-1]:.3g}] m/s covers only "
            f"{inside:.5f} of the thermal weight at T={temperature:.3e} K"
        )

    log_sigma = PchipInterpolator(curve.ln_v, np.log(curve.sigma))

    def integrand(x: float) -> float:
        return math.exp(log_sigma(math.log(x * vt))) * x ** (2.0 + kernel.p) * math.exp(-x * x)

    num, _ = quad(integrand, x_lo, x_hi, epsrel=_QUAD_REL_TOL, limit=200)
    den = 0.5 * gamma_fn(shape) * inside
    return kernel.rate_factor * num / den


@dataclass(frozen=True)
class RelaxationCurve:
    """sigma_rel on a temperature grid for one scattering length."""

    temperature: np.ndarray       # K, ascending
    sigma_rel: np.ndarray         # m^2
    a: float                      # m, nominal scattering length (nan for limits)
    isotope_label: str
    kernel: AverageKernel

    def sigma_at(self, temperature: float) -> float:
        """Log-log interpolation on the grid."""
        return float(
            np.exp(
                np.interp(
                    np.log(temperature),
                    np.log(self.temperature),
                    np.log(self.sigma_rel),
                )
            )
        )

    def to_csv(self, path) -> None:
        header = "T_K,sigma_rel_m2"
        data = np.column_stack([self.temperature, self.sigma_rel])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.10g")


_curve_cache: dict = {}


def tuned_cross_section(
    a: float,
    isotope: IsotopeParams,
    branch: int = DEFAULT_BRANCH,
    l_max: int = DEFAULT_L_MAX,
) -> CrossSectionCurve:
    """Cross-section curve for a potential tuned to scattering length a.

    Tuning and phase-shift integration dominate the cost of relaxation
    curves and chi^2 scans, so results are cached per (a, isotope,
    branch, l_max).
    """
    key = (a, isotope, branch, l_max)
    cached = _curve_cache.get(key)
    if cached is None:
        pot = tune_to_scattering_length(a, isotope, branch=branch)
        cached = cross_section_curve(pot, isotope, DEFAULT_V_GRID, l_max=l_max)
        _curve_cache[key] = cached
    return cached


def relaxation_curve(
    a: float,
    isotope: IsotopeParams,
    kernel: AverageKernel | None = None,
    t_grid: Iterable[float] | None = None,
    branch: int = DEFAULT_BRANCH,
    l_max: int = DEFAULT_L_MAX,
) -> RelaxationCurve:
    """sigma_rel(T) for a potential tuned to scattering length a."""
    kernel = relaxation_kernel() if kernel is None else kernel
    temps = DEFAULT_T_GRID if t_grid is None else np.asarray(list(t_grid), dtype=float)
    curve = tuned_cross_section(a, isotope, branch=branch, l_max=l_max)
    sig = np.array(
        [thermal_average(curve, isotope, float(t), kernel) for t in temps]
    )
    return RelaxationCurve(
        temperature=temps,
        sigma_rel=sig,
        a=a,
        isotope_label=isotope.label,
        kernel=kernel,
    )


def unitarity_limit_curve(
    isotope: IsotopeParams,
    t_grid: Iterable[float] | None = None,
    kernel: AverageKernel | None = None,
) -> RelaxationCurve:
    """sigma_rel(T) for the s-wave unitarity bound 8 pi / k^2.

    Runs through the same averaging machinery as the model curves; the
    closed form is rate_factor * 8 pi hbar^2 / (mu k_B T (p + 1)).
    """
    kernel = relaxation_kernel() if kernel is None else kernel
    temps = DEFAULT_T_GRID if t_grid is None else np.asarray(list(t_grid), dtype=float)
    v = DEFAULT_V_GRID
    k = isotope.reduced_mass * v / HBAR
    curve = CrossSectionCurve(
        v=v,
        sigma=8.0 * math.pi / k**2,
        sigma_per_l=np.empty((0, v.size)),
        l_values=(),
        isotope_label=isotope.label,
        a_nominal=math.nan,
    )
    sig = np.array(
        [thermal_average(curve, isotope, float(t), kernel) for t in temps]
    )
    return RelaxationCurve(
        temperature=temps,
        sigma_rel=sig,
        a=math.nan,
        isotope_label=isotope.label,
        kernel=kernel,
    )
