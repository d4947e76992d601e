"""Units, thermal-state bookkeeping, and measurement-series CSV round trips."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neoncol.constants import K_B
from neoncol.core import (
    CsvFormatError,
    Measurement,
    MeasurementSeries,
    ThermalState,
    TrapConfig,
    aspect_ratio,
    c6_au_to_si,
    default_trap,
    effective_volume,
    load_measurement_series,
    mean_density,
    mean_relative_velocity,
    mean_temperature,
    neon_isotope,
    save_measurement_series,
)

ATOMIC_MASS_KG = 1.66053906892e-27
HARTREE_J = 4.3597447222060e-18
BOHR_M = 5.29177210544e-11

positive_n = st.floats(min_value=1.0e3, max_value=1.0e10)
kelvin = st.floats(min_value=1.0e-6, max_value=1.0e-2)


def _state(n=2.0e8, tx=200e-6, tr=300e-6):
    return ThermalState(n, tx, tr, default_trap(), neon_isotope(20))


def test_default_trap_frequencies():
    trap = default_trap()
    assert trap.omega_x == pytest.approx(2.0 * math.pi * 80.0)
    assert trap.omega_r == pytest.approx(2.0 * math.pi * 186.0)


def test_isotope_masses_and_labels():
    iso20 = neon_isotope(20)
    iso22 = neon_isotope(22)
    assert iso20.mass == pytest.approx(19.9924401762 * ATOMIC_MASS_KG, rel=1e-4)
    assert iso22.mass == pytest.approx(21.991385114 * ATOMIC_MASS_KG, rel=1e-4)
    assert iso20.bosonic and iso22.bosonic
    assert "20" in iso20.label and "22" in iso22.label
    assert iso20.reduced_mass == pytest.approx(iso20.mass / 2.0)


def test_c6_atomic_unit_conversion():
    # 1 au of C6 is one hartree times a0^6
    assert c6_au_to_si(1.0) == pytest.approx(HARTREE_J * BOHR_M**6, rel=1e-6)


@given(n=positive_n, tx=kelvin, tr=kelvin)
@settings(max_examples=50, deadline=None)
def test_effective_volume_closes_on_density(n, tx, tr):
    state = _state(n, tx, tr)
    assert effective_volume(state) * mean_density(state) == pytest.approx(n, rel=1e-12)


@given(tx=kelvin, tr=kelvin)
@settings(max_examples=25, deadline=None)
def test_mean_temperature_ignores_trap_and_isotope(tx, tr):
    a = ThermalState(1e8, tx, tr, default_trap(), neon_isotope(20))
    b = ThermalState(3e5, tx, tr, TrapConfig(10.0, 4000.0), neon_isotope(22))
    assert mean_temperature(a) == mean_temperature(b)
    # one axial and two radial degrees of freedom
    assert mean_temperature(a) == pytest.approx((tx + 2.0 * tr) / 3.0, rel=1e-12)


def test_dimension_audit_power_laws():
    """Outputs scale with the correct powers under unit-consistent rescaling."""
    base = _state()
    s = 1.7

    hot = _state(tx=200e-6 * s, tr=300e-6 * s)
    assert effective_volume(hot) == pytest.approx(
        effective_volume(base) * s**1.5, rel=1e-12
    )
    assert mean_relative_velocity(hot) == pytest.approx(
        mean_relative_velocity(base) * math.sqrt(s), rel=1e-12
    )
    assert aspect_ratio(hot) == pytest.approx(aspect_ratio(base), rel=1e-12)

    trap = default_trap()
    stiff = ThermalState(
        2.0e8, 200e-6, 300e-6,
        TrapConfig(trap.omega_x * s, trap.omega_r * s), neon_isotope(20),
    )
    assert effective_volume(stiff) == pytest.approx(
        effective_volume(base) / s**3, rel=1e-12
    )
    assert aspect_ratio(stiff) == pytest.approx(aspect_ratio(base), rel=1e-12)


def test_equilibrium_aspect_ratio_is_trap_ratio():
    trap = default_trap()
    state = _state(tx=400e-6, tr=400e-6)
    assert aspect_ratio(state) == pytest.approx(trap.omega_r / trap.omega_x, rel=1e-12)
    assert aspect_ratio(state) == pytest.approx(2.325, rel=1e-3)


def test_mean_relative_velocity_closed_form():
    state = _state(tx=600e-6, tr=600e-6)
    iso = neon_isotope(20)
    expect = math.sqrt(16.0 * K_B * 600e-6 / (math.pi * iso.mass))
    assert mean_relative_velocity(state) == pytest.approx(expect, rel=1e-12)


def test_series_requires_increasing_times():
    rec = Measurement(1.0, 1e8, 1e6, 2e-4, 1e-6, 2e-4, 1e-6)
    rec2 = Measurement(0.5, 1e8, 1e6, 2e-4, 1e-6, 2e-4, 1e-6)
    with pytest.raises(ValueError):
        MeasurementSeries((rec, rec2), default_trap(), neon_isotope(20))


def test_series_csv_round_trip(tmp_path):
    trap = default_trap()
    iso = neon_isotope(20)
    records = tuple(
        Measurement(t, 1e8 * math.exp(-t / 5), 2e6, 2e-4, 4e-6, 3e-4, 5e-6)
        for t in (0.0, 1.0, 2.5)
    )
    series = MeasurementSeries(records, trap, iso)
    path = tmp_path / "series.csv"
    save_measurement_series(path, series)
    back = load_measurement_series(path, trap, iso)
    assert len(back.records) == 3
    for orig, copy in zip(series.records, back.records):
        assert copy.t == pytest.approx(orig.t, rel=1e-9)
        assert copy.atom_number == pytest.approx(orig.atom_number, rel=1e-9)
        assert copy.sigma_tr == pytest.approx(orig.sigma_tr, rel=1e-9)


def test_missing_uncertainty_columns_default_to_three_percent(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("t_s,N,Tx_K,Tr_K\n0.0,1e8,2e-4,3e-4\n1.0,9e7,2e-4,3e-4\n")
    series = load_measurement_series(path, default_trap(), neon_isotope(20))
    rec = series.records[0]
    assert rec.sigma_n == pytest.approx(0.03 * 1e8)
    assert rec.sigma_tx == pytest.approx(0.03 * 2e-4)
    assert rec.sigma_tr == pytest.approx(0.03 * 3e-4)


def test_malformed_csv_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t_s,N,sigma_N,Tx_K,sigma_Tx,Tr_K,sigma_Tr\n0.0,1e8,2e6,2e-4,4e-6,3e-4,5e-6\n1.0,not_a_number,2e6,2e-4,4e-6,3e-4,5e-6\n")
    with pytest.raises(CsvFormatError) as err:
        load_measurement_series(path, default_trap(), neon_isotope(20))
    assert "3" in str(err.value)


def test_nonpositive_state_rejected():
    with pytest.raises(ValueError):
        _state(n=-1.0)
    with pytest.raises(ValueError):
        _state(tx=0.0)
