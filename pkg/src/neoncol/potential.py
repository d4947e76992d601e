"""Model interaction potential with a tunable repulsive wall.

V(r) = C12/r^12 - C6/r^6.  C6 is the physical dispersion coefficient;
C12 is not a measured quantity but a knob: sweeping it moves s-wave
bound states through threshold, so any scattering length can be dialed
in on a chosen branch (branch = number of s-wave bound states).  The
well must stay deep enough that the scattering length's sensitivity to
the wall mimics a realistic many-bound-state molecular potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .constants import BOHR_RADIUS, HBAR
from .core import IsotopeParams
from .scattering import zero_energy_solution

__all__ = [
    "ModelPotential",
    "TuningError",
    "DEFAULT_BRANCH",
    "tune_to_scattering_length",
    "s_wave_bound_states",
    "semiclassical_bound_states",
]

# Default number of s-wave bound states for tuned potentials.  Deep
# enough that the effective-range physics is tail-dominated; small
# enough to keep integration grids short.
DEFAULT_BRANCH: int = 6

# Wall starts where V = +30 * depth: comfortably above every collision
# energy used while keeping the forbidden-region growth resolvable.
_WALL_MULTIPLE: float = 30.0
# Tail purity: |V + C6/r^6| / (C6/r^6) <= 1e-6 for r >= r_match.
_TAIL_PURITY: float = 1.0e-6


class TuningError(RuntimeError):
    """Wall tuning failed; carries diagnostic detail."""


@dataclass(frozen=True)
class ModelPotential:
    """Lennard-Jones 12-6 potential, SI units throughout.

    ``a_target`` and ``branch`` record tuning intent; they are metadata,
    not inputs to evaluation.
    """

    c6: float                     # J m^6
    c12: float                    # J m^12
    a_target: float | None = None  # m
    branch: int | None = None

    def __post_init__(self):
        if self.c6 <= 0.0 or self.c12 <= 0.0:
            raise ValueError("C6 and C12 must be positive")

    @property
    def r_minimum(self) -> float:
        """Position of the potential minimum, (2 C12 / C6)^(1/6)."""
        return (2.0 * self.c12 / self.c6) ** (1.0 / 6.0)

    @property
    def depth(self) -> float:
        """Well depth C6^2 / (4 C12), J."""
        return self.c6**2 / (4.0 * self.c12)

    @property
    def r_inner(self) -> float:
        """Integration start radius, where V = +30 * depth."""
        y = 1.0 + math.sqrt(1.0 + _WALL_MULTIPLE)
        return self.r_minimum * y ** (-1.0 / 6.0)

    @property
    def r_match(self) -> float:
        """Radius beyond which V is the pure -C6/r^6 tail to 1e-6."""
        return self.r_minimum * (0.5 / _TAIL_PURITY) ** (1.0 / 6.0)

    def evaluate(self, r):
        """V(r) for r > 0 in meters; accepts scalars or arrays."""
        r = np.asarray(r, dtype=float)
        inv6 = r**-6
        return self.c12 * inv6**2 - self.c6 * inv6


@lru_cache(maxsize=1)
def _lj_action_integral() -> float:
    """Dimensionless phase integral of the standard 12-6 shape.

    J = Int_{x0}^{inf} sqrt(2 x^-6 - x^-12) dx with x0 = 2^(-1/6), for
    V = depth * (x^-12 - 2 x^-6) in units of the minimum position.
    """
    x0 = 2.0 ** (-1.0 / 6.0)

    def integrand(x: float) -> float:
        return math.sqrt(max(2.0 * x**-6 - x**-12, 0.0))

    val, _ = quad(integrand, x0, 50.0, limit=200)
    # analytic tail beyond x = 50: integrand ~ sqrt(2) x^-3
    val += math.sqrt(2.0) / (2.0 * 50.0**2)
    return val


def _semiclassical_phase(c6: float, c12: float, reduced_mass: float) -> float:
    depth = c6**2 / (4.0 * c12)
    r_m = (2.0 * c12 / c6) ** (1.0 / 6.0)
    return math.sqrt(2.0 * reduced_mass * depth) * r_m * _lj_action_integral() / HBAR


def semiclassical_bound_states(pot: ModelPotential, isotope: IsotopeParams) -> int:
    """WKB estimate of the s-wave bound-state count for a -C6/r^6 tail."""
    phi = _semiclassical_phase(pot.c6, pot.c12, isotope.reduced_mass)
    return max(int(math.floor(phi / math.pi - 5.0 / 8.0)) + 1, 0)


def s_wave_bound_states(pot: ModelPotential, isotope: IsotopeParams) -> int:
    """s-wave bound-state count from the zero-energy node count."""
    return zero_energy_solution(pot, isotope).nodes


def _c12_for_phase(c6: float, reduced_mass: float, phi: float) -> float:
    # phi ~ C12^(-1/3) at fixed C6, so invert from one reference point.
    c12_ref = c6 * (0.2 * _vdw_length(c6, reduced_mass)) ** 6 / 2.0
    phi_ref = _semiclassical_phase(c6, c12_ref, reduced_mass)
    return c12_ref * (phi_ref / phi) ** 3


def _vdw_length(c6: float, reduced_mass: float) -> float:
    return (2.0 * reduced_mass * c6 / HBAR**2) ** 0.25


def _nodes(c6: float, c12: float, isotope: IsotopeParams) -> int:
    return zero_energy_solution(ModelPotential(c6, c12), isotope).nodes


def _a_zero(c6: float, c12: float, isotope: IsotopeParams) -> float:
    return zero_energy_solution(ModelPotential(c6, c12), isotope).a


def _bisect_node_edge(
    c6: float, lo: float, hi: float, isotope: IsotopeParams, n_lo: int
) -> float:
    """Refine the C12 where the node count drops below n_lo; nodes(lo) = n_lo."""
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if hi / lo - 1.0 < 1.0e-9:
            break
        if _nodes(c6, mid, isotope) >= n_lo:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def tune_to_scattering_length(
    a_target: float,
    isotope: IsotopeParams,
    branch: int = DEFAULT_BRANCH,
    rel_tol: float = 1.0e-3,
) -> ModelPotential:
    """Adjust the wall so the zero-energy scattering length hits a_target.

    Within one branch (fixed bound-state count) the scattering length
    rises monotonically from -inf to +inf as C12 grows, so after the
    branch edges are located by node counting, plain bisection on the
    zero-energy scattering length converges.  Tolerance is ``rel_tol``
    relative with a floor of half a Bohr radius for targets near zero.
    """
    if branch < 1:
        raise ValueError("branch must be at least 1")
    c6 = isotope.c6
    mu = isotope.reduced_mass
    tol = max(rel_tol * abs(a_target), 0.5 * BOHR_RADIUS)

    # Land on the requested branch using the WKB phase as a first guess.
    phi_mid = math.pi * (branch + 1.0 / 8.0)
    c12 = _c12_for_phase(c6, mu, phi_mid)
    for _ in range(80):
        n = _nodes(c6, c12, isotope)
        if n == branch:
            break
        c12 = c12 * 1.35 if n > branch else c12 / 1.35
    else:
        raise TuningError(f"could not reach branch {branch} by wall scaling")

    # Bracket both branch edges (node count falls as the wall grows).
    lo = c12
    while _nodes(c6, lo / 1.3, isotope) == branch:
        lo /= 1.3
    hi = c12
    while _nodes(c6, hi * 1.3, isotope) == branch:
        hi *= 1.3
    edge_lo = _bisect_node_edge(c6, lo / 1.3, lo, isotope, branch + 1)
    edge_hi = _bisect_node_edge(c6, hi, hi * 1.3, isotope, branch)

    # Bisect on a(C12) - a_target inside the branch; a is monotone there,
    # rising from -inf at the lower edge to +inf at the upper one.  The
    # edges are only located to ~1e-9 relative, so step inside by more
    # than that and walk further in if an endpoint still sits on the
    # far side of the pole.
    lo, hi = edge_lo * (1.0 + 1.0e-8), edge_hi * (1.0 - 1.0e-8)
    a_lo = _a_zero(c6, lo, isotope)
    for _ in range(40):
        if a_lo < a_target and _nodes(c6, lo, isotope) == branch:
            break
        lo *= 1.0 + 1.0e-8
        a_lo = _a_zero(c6, lo, isotope)
    a_hi = _a_zero(c6, hi, isotope)
    for _ in range(40):
        if a_hi > a_target and _nodes(c6, hi, isotope) == branch:
            break
        hi *= 1.0 - 1.0e-8
        a_hi = _a_zero(c6, hi, isotope)
    if not (a_lo < a_target < a_hi):
        raise TuningError(
            f"target {a_target / BOHR_RADIUS:.1f} a0 outside branch range "
            f"[{a_lo / BOHR_RADIUS:.3g}, {a_hi / BOHR_RADIUS:.3g}] a0; "
            "a resonance pole sits at the branch edge"
        )
    best_c12, best_a = lo, a_lo
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        a_mid = _a_zero(c6, mid, isotope)
        if abs(a_mid - a_target) < abs(best_a - a_target):
            best_c12, best_a = mid, a_mid
        if abs(a_mid - a_target) <= tol:
            break
        if a_mid < a_target:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1.0e-15:
            break
    if abs(best_a - a_target) > tol:
        raise TuningError(
            f"bisection stalled at a = {best_a / BOHR_RADIUS:.4g} a0 for target "
            f"{a_target / BOHR_RADIUS:.4g} a0 (tolerance {tol / BOHR_RADIUS:.3g} a0)"
        )
    return ModelPotential(c6=c6, c12=best_c12, a_target=a_target, branch=branch)
