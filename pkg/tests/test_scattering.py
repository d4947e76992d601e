"""Radial integration, phase-shift extraction, and zero-energy matching.

Closed-form oracles (free particle, hard sphere, finite square well) pin
the integrator and the two-point matcher; statistical and threshold-law
checks pin the van der Waals tail physics.
"""

import math

import numpy as np
import pytest

from neoncol.constants import HBAR, K_B
from neoncol.core import IsotopeParams, neon_isotope
from neoncol.potential import ModelPotential, semiclassical_bound_states
from neoncol.scattering import (
    BOHR_RADIUS,
    ConvergenceError,
    centrifugal_barrier,
    cross_section_curve,
    elastic_cross_section,
    extract_scattering_length,
    mean_scattering_length,
    phase_shift,
    solve_radial,
    tan_delta_two_point,
    unitarity_cross_section,
    vdw_length,
    zero_energy_solution,
)

A0 = BOHR_RADIUS


def _mod_pi(d: float) -> float:
    return abs((d + math.pi / 2.0) % math.pi - math.pi / 2.0)


# -- closed-form oracles -----------------------------------------------------


@pytest.mark.parametrize("l", [0, 2, 4])
def test_free_particle_scatters_nothing(l, iso20):
    mu = iso20.reduced_mass
    k = 1.0e8
    r0 = 0.0 if l == 0 else 0.02 / k
    r, u = solve_radial(lambda r: np.zeros_like(r), mu, HBAR**2 * k**2 / (2 * mu), l, r0, 30.0 / k, 0.005 / k)
    i1 = int(np.searchsorted(r, 20.0 / k))
    t = tan_delta_two_point(k, l, r[i1], u[i1], r[-1], u[-1])
    assert abs(t) < 1.0e-6


@pytest.mark.parametrize("k_radius", [0.3, 1.1])
def test_hard_sphere_phase_is_minus_k_radius(k_radius, iso20):
    mu = iso20.reduced_mass
    radius = 5.0e-9
    k = k_radius / radius
    # contact boundary condition u(R) = 0; force-free outside
    r, u = solve_radial(
        lambda r: np.zeros_like(r), mu, HBAR**2 * k**2 / (2 * mu), 0, radius, radius + 12.0 / k, 0.002 / k
    )
    i1 = int(np.searchsorted(r, radius + 6.0 / k))
    t = tan_delta_two_point(k, 0, r[i1], u[i1], r[-1], u[-1])
    assert t == pytest.approx(math.tan(-k_radius), rel=1e-9, abs=1e-9)


def test_square_well_phase_matches_textbook_formula(iso20):
    mu = iso20.reduced_mass
    radius = 5.0e-9
    k = 0.7 / radius
    q = 2.4 / radius                      # sqrt(2 mu V0) / hbar
    v0 = HBAR**2 * q**2 / (2.0 * mu)
    k_in = math.hypot(k, q)
    expected = -k * radius + math.atan(k / k_in * math.tan(k_in * radius))

    def well(r):
        v = np.where(r < radius, -v0, 0.0)
        # midpoint value at the step keeps the integrator high order
        return np.where(np.abs(r - radius) < radius / 8000.0, -0.5 * v0, v)

    # r_stop = 15 R with h = R/2000 puts the step on a grid node
    r, u = solve_radial(well, mu, HBAR**2 * k**2 / (2 * mu), 0, 0.0, 15.0 * radius, radius / 2000.0)
    i1 = int(np.searchsorted(r, radius + 5.0 / k))
    t = tan_delta_two_point(k, 0, r[i1], u[i1], r[-1], u[-1])
    assert t == pytest.approx(math.tan(expected), rel=1e-5)


def test_solver_rejects_negative_l(iso20):
    with pytest.raises(ValueError):
        solve_radial(lambda r: np.zeros_like(r), iso20.reduced_mass, 1e-30, -1, 1e-10, 1e-8, 1e-11)


# -- model-potential phase shifts --------------------------------------------


def test_phase_shift_requires_positive_energy(pot_p22, iso20):
    with pytest.raises(ValueError):
        phase_shift(pot_p22, iso20, 0.0, 0)


def test_phase_shift_reports_convergence_residual(pot_p22, iso20):
    energy = 0.5 * iso20.reduced_mass * 1.0**2
    with pytest.raises(ConvergenceError) as exc:
        phase_shift(pot_p22, iso20, energy, 0, tol=0.0)
    assert "not grid-converged" in str(exc.value)
    assert exc.value.residual > 0.0


def test_phase_insensitive_to_matching_radius(pot_m180, iso20):
    class FartherMatch:
        def __init__(self, base, factor):
            self._base = base
            self.r_match = base.r_match * factor

        def __getattr__(self, name):
            return getattr(self._base, name)

    energy = K_B * 300e-6
    d1 = phase_shift(pot_m180, iso20, energy, 0)
    d2 = phase_shift(FartherMatch(pot_m180, 1.5), iso20, energy, 0)
    assert _mod_pi(d1 - d2) <= 0.005 * abs(d1)


def test_gwave_phase_follows_quartic_threshold_law(pot_p22, iso20):
    # -C6/r^6 tail: delta_l ~ k^4 for l >= 2 below the barrier
    mu = iso20.reduced_mass
    d1 = phase_shift(pot_p22, iso20, 0.5 * mu * 1.0**2, 4)
    d2 = phase_shift(pot_p22, iso20, 0.5 * mu * 2.0**2, 4)
    assert d1 > 0.0 and d2 > 0.0
    assert d2 / d1 == pytest.approx(16.0, rel=0.25)


def test_dwave_frozen_out_at_200_microkelvin(pot_m180, iso20):
    v = math.sqrt(2.0 * K_B * 200e-6 / iso20.reduced_mass)
    s_only = elastic_cross_section(pot_m180, iso20, v, l_max=0)
    with_d = elastic_cross_section(pot_m180, iso20, v, l_max=2)
    assert abs(with_d - s_only) / s_only < 0.05


# -- cross sections ----------------------------------------------------------


def test_cross_section_reaches_zero_energy_limit(curve_m180):
    a = curve_m180.a_nominal
    assert curve_m180.sigma[0] == pytest.approx(8.0 * math.pi * a**2, rel=0.02)


@pytest.mark.parametrize("curve_name", ["curve_m180", "curve_p22", "curve_p150"])
def test_partial_waves_respect_unitarity(request, curve_name):
    curve = request.getfixturevalue(curve_name)
    iso = neon_isotope(22 if curve.isotope_label.endswith("22") else 20)
    bound = unitarity_cross_section(iso, curve.v)
    increments = np.diff(curve.sigma_per_l, axis=0, prepend=0.0)
    for i, l in enumerate(curve.l_values):
        assert np.all(increments[i] <= bound * (2 * l + 1) * (1.0 + 1e-12))
    assert np.allclose(curve.sigma_per_l[-1], curve.sigma)


def test_interpolation_clamps_outside_grid(curve_p22):
    assert curve_p22.sigma_at(curve_p22.v[0] / 10.0) == curve_p22.sigma[0]
    assert curve_p22.sigma_at(curve_p22.v[-1] * 10.0) == curve_p22.sigma[-1]
    mid = math.sqrt(curve_p22.v[3] * curve_p22.v[4])
    lo, hi = sorted(curve_p22.sigma[3:5])
    assert lo <= curve_p22.sigma_at(mid) <= hi


def test_cross_section_rejects_bad_inputs(pot_p22, iso20):
    fermionic = IsotopeParams(label="ne21", mass=iso20.mass * 21.0 / 20.0, c6=iso20.c6, bosonic=False)
    with pytest.raises(ValueError):
        elastic_cross_section(pot_p22, fermionic, 1.0)
    with pytest.raises(ValueError):
        elastic_cross_section(pot_p22, iso20, -1.0)
    with pytest.raises(ValueError):
        cross_section_curve(pot_p22, fermionic)


# -- zero energy and scattering length ---------------------------------------


def test_extrapolated_length_agrees_with_zero_energy_matching(pot_m180, iso20):
    direct = zero_energy_solution(pot_m180, iso20)
    extrap = extract_scattering_length(pot_m180, iso20)
    assert extrap.value == pytest.approx(direct.a, rel=0.01)
    assert not extrap.resonant
    assert extrap.error < 0.01 * abs(extrap.value)
    assert len(extrap.samples) == len(extrap.k_sequence) == 4
    assert all(b < a for a, b in zip(extrap.k_sequence, extrap.k_sequence[1:]))


@pytest.fixture(scope="module")
def wall_scan(pot_p22, iso20):
    """Zero-energy solutions across ~7 branches of wall strength."""
    factors = np.geomspace(1.35**-6, 1.35**6, 41)
    out = []
    for f in factors:
        pot = ModelPotential(pot_p22.c6, pot_p22.c12 * f)
        out.append((pot, zero_energy_solution(pot, iso20)))
    return out


def test_wall_ensemble_statistics_match_tail_prediction(wall_scan, iso20):
    # semiclassical tail result: median a equals the mean scattering
    # length, and a quarter of walls give a < 0
    abar = mean_scattering_length(iso20.c6, iso20.reduced_mass)
    a = np.array([res.a for _, res in wall_scan])
    regular = a[np.abs(a) < 5000.0 * A0]
    assert len(regular) > 30
    assert abs(np.median(regular) - abar) < 0.6 * abar
    negative_fraction = np.mean(regular < 0.0)
    assert abs(negative_fraction - 0.25) < 0.15


def test_semiclassical_count_tracks_nodes_across_walls(wall_scan, iso20):
    for pot, res in wall_scan:
        assert abs(semiclassical_bound_states(pot, iso20) - res.nodes) <= 1


def test_vdw_scales_set_the_length_unit(iso20, iso22):
    b20 = vdw_length(iso20.c6, iso20.reduced_mass)
    assert b20 == pytest.approx((2.0 * iso20.reduced_mass * iso20.c6 / HBAR**2) ** 0.25, rel=1e-14)
    # heavier isotope, longer vdW length, larger mean scattering length
    assert vdw_length(iso22.c6, iso22.reduced_mass) > b20
    ratio = mean_scattering_length(iso20.c6, iso20.reduced_mass) / b20
    assert ratio == pytest.approx(0.477989, rel=1e-5)


def test_centrifugal_barrier_scalings(iso20):
    assert centrifugal_barrier(iso20, 0) == 0.0
    quadrupled = neon_isotope(20, c6_au=4.0 * 2100.0)
    assert centrifugal_barrier(quadrupled, 2) == pytest.approx(centrifugal_barrier(iso20, 2) / 2.0, rel=1e-12)
    # height scales as [l(l+1)]^(3/2)
    expected = (20.0 / 6.0) ** 1.5
    assert centrifugal_barrier(iso20, 4) / centrifugal_barrier(iso20, 2) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        centrifugal_barrier(iso20, -1)
