"""Shared fixtures: tuned potentials, cross-section curves, and the
constant-cross-section reference simulation reused across modules.

The expensive fixtures are session-scoped; tuning a potential takes
seconds and a 2e4-particle simulation minutes, so tests share them.
"""
import math

import pytest

from neoncol.core import ThermalState, default_trap, neon_isotope
from neoncol.dsmc import SimConfig, run
from neoncol.potential import tune_to_scattering_length
from neoncol.scattering import BOHR_RADIUS, cross_section_curve
from neoncol.thermal import relaxation_kernel

A0 = BOHR_RADIUS

# acceptance lines collected by tests/test_acceptance.py and printed at the
# end of the run, one per criterion
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def iso20():
    return neon_isotope(20)


@pytest.fixture(scope="session")
def iso22():
    return neon_isotope(22)


@pytest.fixture(scope="session")
def trap():
    return default_trap()


@pytest.fixture(scope="session")
def kernel():
    return relaxation_kernel()


@pytest.fixture(scope="session")
def pot_m180(iso20):
    return tune_to_scattering_length(-180.0 * A0, iso20)


@pytest.fixture(scope="session")
def pot_p22(iso20):
    return tune_to_scattering_length(22.0 * A0, iso20)


@pytest.fixture(scope="session")
def pot_p150(iso22):
    return tune_to_scattering_length(150.0 * A0, iso22)


@pytest.fixture(scope="session")
def curve_m180(pot_m180, iso20):
    return cross_section_curve(pot_m180, iso20, a_nominal=-180.0 * A0)


@pytest.fixture(scope="session")
def curve_p22(pot_p22, iso20):
    return cross_section_curve(pot_p22, iso20, a_nominal=22.0 * A0)


@pytest.fixture(scope="session")
def curve_p150(pot_p150, iso22):
    return cross_section_curve(pot_p150, iso22, a_nominal=150.0 * A0)


# conditions of the constant-cross-section reference run; several tests and
# acceptance criteria compare against predictions computed from these
CONST_SIGMA0 = 3.0e-16      # m^2
CONST_N0 = 2.0e8
CONST_TX0 = 650.0e-6        # K
CONST_TR0 = 500.0e-6        # K
CONST_NTEST = 20_000
CONST_SEED = 11
CONST_DURATION = 0.85       # s, about 3 relaxation e-foldings


@pytest.fixture(scope="session")
def const_state(iso20, trap):
    return ThermalState(CONST_N0, CONST_TX0, CONST_TR0, trap, iso20)


@pytest.fixture(scope="session")
def const_config(iso20, trap):
    return SimConfig(
        n_test=CONST_NTEST,
        weight=CONST_N0 / CONST_NTEST,
        isotope=iso20,
        trap=trap,
        sigma0=CONST_SIGMA0,
        seed=CONST_SEED,
    )


@pytest.fixture(scope="session")
def const_trace(const_config, const_state):
    """Loss-free constant-sigma relaxation run, ~3 e-foldings."""
    return run(const_config, const_state, CONST_DURATION)


def mean_rel_speed(isotope, temperature):
    """Mean relative speed of a same-species thermal pair, m/s."""
    from neoncol.constants import K_B

    return math.sqrt(16.0 * K_B * temperature / (math.pi * isotope.mass))
