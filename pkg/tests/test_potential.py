"""Shape identities, wall tuning, and branch structure of the model potential."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neoncol.core import neon_isotope
from neoncol.potential import (
    DEFAULT_BRANCH,
    ModelPotential,
    s_wave_bound_states,
    semiclassical_bound_states,
    tune_to_scattering_length,
)
from neoncol.scattering import BOHR_RADIUS, zero_energy_solution

A0 = BOHR_RADIUS


def _reference_potential():
    iso = neon_isotope(20)
    r_m = 12.0 * A0
    return ModelPotential(c6=iso.c6, c12=iso.c6 * r_m**6 / 2.0)


def test_minimum_location_and_depth_closed_forms():
    pot = _reference_potential()
    r_m = pot.r_minimum
    assert r_m == pytest.approx((2.0 * pot.c12 / pot.c6) ** (1.0 / 6.0), rel=1e-14)
    assert pot.depth == pytest.approx(pot.c6**2 / (4.0 * pot.c12), rel=1e-14)
    assert pot.evaluate(r_m) == pytest.approx(-pot.depth, rel=1e-12)
    # extremum: both neighbours sit above the minimum value
    for shift in (0.999, 1.001):
        assert pot.evaluate(r_m * shift) > -pot.depth


def test_tail_is_pure_dispersion_beyond_match_radius():
    pot = _reference_potential()
    r = np.geomspace(pot.r_match, 3.0 * pot.r_match, 40)
    tail = -pot.c6 / r**6
    rel_dev = np.abs(pot.evaluate(r) - tail) / np.abs(tail)
    assert np.all(rel_dev <= 1.0e-6 * (1.0 + 1e-9))
    # the bound is tight at r_match itself and decays as r^-6 outward
    assert rel_dev[0] == pytest.approx(1.0e-6, rel=1e-6)
    assert rel_dev[-1] < rel_dev[0] / 100.0


def test_inner_radius_sits_at_thirty_well_depths():
    pot = _reference_potential()
    assert pot.evaluate(pot.r_inner) == pytest.approx(30.0 * pot.depth, rel=1e-10)
    assert pot.r_inner < pot.r_minimum < pot.r_match


def test_rejects_nonpositive_coefficients():
    good = _reference_potential()
    for c6, c12 in [(0.0, good.c12), (good.c6, 0.0), (-good.c6, good.c12), (good.c6, -good.c12)]:
        with pytest.raises(ValueError):
            ModelPotential(c6=c6, c12=c12)


@given(scale=st.floats(min_value=0.01, max_value=100.0))
@settings(max_examples=40, deadline=None)
def test_wall_scaling_relations(scale):
    pot = _reference_potential()
    scaled = ModelPotential(c6=pot.c6, c12=pot.c12 * scale)
    assert scaled.r_minimum == pytest.approx(pot.r_minimum * scale ** (1.0 / 6.0), rel=1e-12)
    assert scaled.depth == pytest.approx(pot.depth / scale, rel=1e-12)
    # characteristic radii all share the r_minimum scaling
    assert scaled.r_inner / scaled.r_minimum == pytest.approx(pot.r_inner / pot.r_minimum, rel=1e-12)
    assert scaled.r_match / scaled.r_minimum == pytest.approx(pot.r_match / pot.r_minimum, rel=1e-12)


@pytest.mark.parametrize(
    "pot_name,iso_name,target_a0",
    [
        ("pot_m180", "iso20", -180.0),
        ("pot_p22", "iso20", 22.0),
        ("pot_p150", "iso22", 150.0),
    ],
)
def test_tuned_wall_reproduces_target_length(request, pot_name, iso_name, target_a0):
    pot = request.getfixturevalue(pot_name)
    iso = request.getfixturevalue(iso_name)
    target = target_a0 * A0
    tol = max(1.0e-3 * abs(target), 0.5 * A0)
    result = zero_energy_solution(pot, iso)
    assert abs(result.a - target) <= tol
    assert pot.a_target == target
    assert pot.branch == DEFAULT_BRANCH
    assert pot.c6 == iso.c6


@pytest.mark.parametrize(
    "pot_name,iso_name",
    [("pot_m180", "iso20"), ("pot_p22", "iso20"), ("pot_p150", "iso22")],
)
def test_tuned_wall_sits_on_requested_branch(request, pot_name, iso_name):
    pot = request.getfixturevalue(pot_name)
    iso = request.getfixturevalue(iso_name)
    assert s_wave_bound_states(pot, iso) == DEFAULT_BRANCH
    assert abs(semiclassical_bound_states(pot, iso) - DEFAULT_BRANCH) <= 1


def test_tuner_orders_walls_with_target_length(iso20):
    # within one branch the scattering length must rise with the wall
    targets = [-500.0, -180.0, -50.0, 22.0, 100.0]
    pots = [tune_to_scattering_length(t * A0, iso20) for t in targets]
    c12s = [p.c12 for p in pots]
    assert all(b > a for a, b in zip(c12s, c12s[1:]))
    assert all(s_wave_bound_states(p, iso20) == DEFAULT_BRANCH for p in pots)


def test_tuner_rejects_branch_below_one(iso20):
    with pytest.raises(ValueError):
        tune_to_scattering_length(100.0 * A0, iso20, branch=0)


@pytest.fixture(scope="module")
def node_scan(pot_m180, iso20):
    """Node counts along a geometric wall sweep around the tuned potential.

    Step 1.15 in c12 moves the semiclassical phase by under 5%, so the
    count can fall by at most one between neighbours.
    """
    factors = 1.15 ** np.arange(-8, 9)
    out = []
    for f in factors:
        c12 = pot_m180.c12 * f
        out.append((c12, s_wave_bound_states(ModelPotential(pot_m180.c6, c12), iso20)))
    return out


def test_node_count_falls_monotonically_as_wall_grows(node_scan):
    counts = [n for _, n in node_scan]
    assert all(b <= a for a, b in zip(counts, counts[1:]))
    assert all(a - b <= 1 for a, b in zip(counts, counts[1:]))
    assert counts[0] - counts[-1] >= 3


def test_length_diverges_oppositely_across_a_node_loss(node_scan, iso20):
    c6 = neon_isotope(20).c6
    transitions = [
        k for k in range(len(node_scan) - 1) if node_scan[k][1] - node_scan[k + 1][1] == 1
    ]
    assert transitions
    k = transitions[len(transitions) // 2]
    lo, n_lo = node_scan[k]
    hi, n_hi = node_scan[k + 1]
    for _ in range(60):
        if hi / lo - 1.0 < 1.0e-10:
            break
        mid = math.sqrt(lo * hi)
        if s_wave_bound_states(ModelPotential(c6, mid), iso20) == n_lo:
            lo = mid
        else:
            hi = mid
    pole = math.sqrt(lo * hi)
    below = zero_energy_solution(ModelPotential(c6, pole * (1.0 - 1e-8)), iso20)
    above = zero_energy_solution(ModelPotential(c6, pole * (1.0 + 1e-8)), iso20)
    assert below.nodes == above.nodes + 1
    # losing the least-bound state sweeps a from +inf back in from -inf
    assert below.a > 1.0e3 * A0
    assert above.a < -1.0e3 * A0
