"""Trap, isotope, and thermal-state primitives.

A harmonically trapped thermal cloud is fully described by the atom
number and the two temperatures along the trap axes.  Gaussian density
profiles give closed forms for the widths, the effective volume and the
density-weighted mean density:

    sigma_i = sqrt(kB T_i / m) / omega_i
    V_eff   = N / nbar = (4 pi)^(3/2) sigma_x sigma_r^2
    nbar    = (1/N) Int n(r)^2 d3r = n0 / 2^(3/2)

Cross-dimensional quantities use the weighted mean temperature
Tbar = (Tx + 2 Tr)/3 and the mean relative speed
vbar = sqrt(16 kB Tbar / (pi m)).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .constants import ATOMIC_MASS, K_B, c6_au_to_si

__all__ = [
    "DEFAULT_C6_AU",
    "IsotopeParams",
    "TrapConfig",
    "ThermalState",
    "Measurement",
    "MeasurementSeries",
    "CsvFormatError",
    "neon_isotope",
    "default_trap",
    "mean_density",
    "effective_volume",
    "mean_temperature",
    "mean_relative_velocity",
    "aspect_ratio",
    "load_measurement_series",
    "save_measurement_series",
]

# Dispersion coefficient for the spin-stretched metastable pair, in
# hartree a0^6.  Chosen so the d-wave centrifugal barrier of the
# -C6/r^6 tail comes out at kB * 5.6 mK for the lighter isotope; the
# published ab initio values carry a few-percent spread, so this is a
# configuration default, not a measured constant.
DEFAULT_C6_AU: float = 2100.0

# Relative uncertainty assigned to columns missing from an input series.
DEFAULT_RELATIVE_UNCERTAINTY: float = 0.03

_ISOTOPE_MASS_U = {20: 19.9924401762, 22: 21.991385114}


class CsvFormatError(ValueError):
    """Malformed measurement CSV; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class IsotopeParams:
    """Colliding species: mass, dispersion coefficient, statistics."""

    label: str
    mass: float          # kg
    c6: float            # J m^6
    bosonic: bool = True

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.c6 <= 0.0:
            raise ValueError("C6 must be positive")

    @property
    def reduced_mass(self) -> float:
        """Reduced mass of an identical pair, m/2."""
        return 0.5 * self.mass


def neon_isotope(mass_number: int, c6_au: float = DEFAULT_C6_AU) -> IsotopeParams:
    """Bosonic metastable neon isotope, mass number 20 or 22."""
    try:
        mass_u = _ISOTOPE_MASS_U[mass_number]
    except KeyError:
        raise ValueError(f"unsupported mass number {mass_number}") from None
    return IsotopeParams(
        label=f"{mass_number}Ne",
        mass=mass_u * ATOMIC_MASS,
        c6=c6_au_to_si(c6_au),
        bosonic=True,
    )


@dataclass(frozen=True)
class TrapConfig:
    """Cylindrically symmetric harmonic trap (one axial, two radial axes)."""

    omega_x: float       # rad/s, axial
    omega_r: float       # rad/s, radial

    def __post_init__(self):
        if self.omega_x <= 0.0 or self.omega_r <= 0.0:
            raise ValueError("trap frequencies must be positive")


def default_trap() -> TrapConfig:
    """Measured trap of the reference apparatus: 2pi*80 / 2pi*186 Hz."""
    return TrapConfig(omega_x=2.0 * math.pi * 80.0, omega_r=2.0 * math.pi * 186.0)


@dataclass(frozen=True)
class ThermalState:
    """Gaussian thermal cloud: atom number plus per-axis temperatures."""

    atom_number: float
    t_x: float           # K, axial temperature
    t_r: float           # K, radial temperature
    trap: TrapConfig
    isotope: IsotopeParams

    def __post_init__(self):
        if self.atom_number <= 0.0:
            raise ValueError("atom number must be positive")
        if self.t_x <= 0.0 or self.t_r <= 0.0:
            raise ValueError("temperatures must be positive")

    @property
    def sigma_x(self) -> float:
        """Axial rms width, m."""
        return math.sqrt(K_B * self.t_x / self.isotope.mass) / self.trap.omega_x

    @property
    def sigma_r(self) -> float:
        """Radial rms width, m."""
        return math.sqrt(K_B * self.t_r / self.isotope.mass) / self.trap.omega_r


def mean_temperature(state: ThermalState) -> float:
    """Weighted mean temperature Tbar = (Tx + 2 Tr) / 3, K."""
    return (state.t_x + 2.0 * state.t_r) / 3.0


def effective_volume(state: ThermalState) -> float:
    """Two-body effective volume V_eff = (4 pi)^(3/2) sigma_x sigma_r^2, m^3."""
    return (4.0 * math.pi) ** 1.5 * state.sigma_x * state.sigma_r**2


def mean_density(state: ThermalState) -> float:
    """Density-weighted mean density nbar = N / V_eff, m^-3.

    For a Gaussian profile this equals n0 / 2^(3/2) with n0 the peak
    density.
    """
    return state.atom_number / effective_volume(state)


def mean_relative_velocity(state: ThermalState) -> float:
    """Mean relative speed of identical pairs at Tbar, m/s."""
    tbar = mean_temperature(state)
    return math.sqrt(16.0 * K_B * tbar / (math.pi * state.isotope.mass))


def aspect_ratio(state: ThermalState) -> float:
    """Cloud aspect ratio A = sigma_x / sigma_r (dimensionless)."""
    return state.sigma_x / state.sigma_r


@dataclass(frozen=True)
class Measurement:
    """One timed observation of the cloud with 1-sigma uncertainties."""

    t: float             # s
    atom_number: float
    sigma_n: float
    t_x: float           # K
    sigma_tx: float
    t_r: float           # K
    sigma_tr: float

    def __post_init__(self):
        if self.atom_number <= 0.0 or self.t_x <= 0.0 or self.t_r <= 0.0:
            raise ValueError("atom number and temperatures must be positive")
        if min(self.sigma_n, self.sigma_tx, self.sigma_tr) < 0.0:
            raise ValueError("uncertainties must be non-negative")


@dataclass(frozen=True)
class MeasurementSeries:
    """Time-ordered measurements sharing one trap and isotope context."""

    records: tuple[Measurement, ...]
    trap: TrapConfig
    isotope: IsotopeParams

    def __post_init__(self):
        if len(self.records) == 0:
            raise ValueError("series must contain at least one record")
        times = [m.t for m in self.records]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("record times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.records)

    def state(self, i: int) -> ThermalState:
        m = self.records[i]
        return ThermalState(m.atom_number, m.t_x, m.t_r, self.trap, self.isotope)

    def states(self) -> list[ThermalState]:
        return [self.state(i) for i in range(len(self.records))]

    def times(self) -> np.ndarray:
        return np.array([m.t for m in self.records])


_CSV_COLUMNS = ("t_s", "N", "sigma_N", "Tx_K", "sigma_Tx", "Tr_K", "sigma_Tr")
_REQUIRED_COLUMNS = ("t_s", "N", "Tx_K", "Tr_K")


def load_measurement_series(
    path,
    trap: TrapConfig,
    isotope: IsotopeParams,
    default_rel_unc: float = DEFAULT_RELATIVE_UNCERTAINTY,
) -> MeasurementSeries:
    """Read a measurement series from CSV.

    Expected header: t_s, N, sigma_N, Tx_K, sigma_Tx, Tr_K, sigma_Tr.
    The three uncertainty columns may be omitted entirely; missing
    uncertainties default to ``default_rel_unc`` relative.  Malformed
    content raises :class:`CsvFormatError` with the line number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(1, "empty file") from None
        header = [h.strip() for h in header]
        unknown = [h for h in header if h not in _CSV_COLUMNS]
        if unknown:
            raise CsvFormatError(1, f"unknown columns {unknown}")
        missing = [c for c in _REQUIRED_COLUMNS if c not in header]
        if missing:
            raise CsvFormatError(1, f"missing required columns {missing}")
        idx = {name: header.index(name) for name in header}

        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    lineno, f"expected {len(header)} fields, got {len(row)}"
                )

            def get(col: str) -> float | None:
                if col not in idx:
                    return None
                text = row[idx[col]].strip()
                if not text:
                    return None
                try:
                    return float(text)
                except ValueError:
                    raise CsvFormatError(
                        lineno, f"bad value {text!r} in column {col}"
                    ) from None

            t = get("t_s")
            n = get("N")
            tx = get("Tx_K")
            tr = get("Tr_K")
            if None in (t, n, tx, tr):
                raise CsvFormatError(lineno, "missing required value")
            sn = get("sigma_N")
            stx = get("sigma_Tx")
            str_ = get("sigma_Tr")
            try:
                records.append(
                    Measurement(
                        t=t,
                        atom_number=n,
                        sigma_n=sn if sn is not None else default_rel_unc * n,
                        t_x=tx,
                        sigma_tx=stx if stx is not None else default_rel_unc * tx,
                        t_r=tr,
                        sigma_tr=str_ if str_ is not None else default_rel_unc * tr,
                    )
                )
            except ValueError as exc:
                raise CsvFormatError(lineno, str(exc)) from None

    if not records:
        raise CsvFormatError(2, "no data rows")
    try:
        return MeasurementSeries(tuple(records), trap, isotope)
    except ValueError as exc:
        raise CsvFormatError(2, str(exc)) from None


def save_measurement_series(path, series: MeasurementSeries) -> None:
    """Write a series in the same CSV schema accepted by the loader."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for m in series.records:
            writer.writerow(
                [
                    f"{m.t:.10g}",
                    f"{m.atom_number:.10g}",
                    f"{m.sigma_n:.10g}",
                    f"{m.t_x:.10g}",
                    f"{m.sigma_tx:.10g}",
                    f"{m.t_r:.10g}",
                    f"{m.sigma_tr:.10g}",
                ]
            )
