"""Physical constants and unit conversions used throughout the package.

All internal computation is in SI.  Atomic units appear only at input
boundaries: van der Waals C6 coefficients are quoted in hartree * a0^6
and scattering lengths in Bohr radii.
"""

from __future__ import annotations

__all__ = [
    "HBAR",
    "K_B",
    "ATOMIC_MASS",
    "BOHR_RADIUS",
    "HARTREE",
    "HARTREE_BOHR6",
    "c6_au_to_si",
    "c6_si_to_au",
    "a0_to_m",
    "m_to_a0",
]

# CODATA 2018
HBAR: float = 1.054571817e-34        # J s
K_B: float = 1.380649e-23            # J / K (exact)
ATOMIC_MASS: float = 1.66053906660e-27   # kg
BOHR_RADIUS: float = 5.29177210903e-11   # m
HARTREE: float = 4.3597447222071e-18     # J

# C6 unit: one hartree * a0^6 in J m^6
HARTREE_BOHR6: float = HARTREE * BOHR_RADIUS**6


def c6_au_to_si(c6_au: float) -> float:
    """Convert a C6 dispersion coefficient from atomic units to J m^6."""
    return c6_au * HARTREE_BOHR6


def c6_si_to_au(c6_si: float) -> float:
    """Convert a C6 dispersion coefficient from J m^6 to atomic units."""
    return c6_si / HARTREE_BOHR6


def a0_to_m(length_a0: float) -> float:
    """Convert a length in Bohr radii to meters."""
    return length_a0 * BOHR_RADIUS


def m_to_a0(length_m: float) -> float:
    """Convert a length in meters to Bohr radii."""
    return length_m / BOHR_RADIUS
