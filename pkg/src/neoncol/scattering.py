"""Single-channel partial-wave scattering on a model potential.

The radial equation

    u''(r) = [ 2 mu (V(r) - E) / hbar^2 + l(l+1)/r^2 ] u(r)

is integrated outward with the Numerov recurrence on a uniform grid and
matched to a pair of free spherical Bessel solutions at two radii where
the potential has become negligible against E.  That yields tan(delta_l)
without numerical differentiation.

For identical spin-polarized bosons only even partial waves contribute:

    sigma_el(v) = (8 pi / k^2) sum_{l even} (2l+1) sin^2(delta_l),
    k = mu v / hbar.

The zero-energy solution is matched instead to the exact zero-energy
solutions of the -C6/r^6 tail, sqrt(r) J_{+-1/4}(beta6^2 / 2 r^2), whose
r -> infinity limits give the scattering length directly; the node count
of that solution is the s-wave bound-state count (Levinson).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import jv, spherical_jn, spherical_yn

from ._jit import njit
from .constants import BOHR_RADIUS, HBAR
from .core import IsotopeParams

__all__ = [
    "ConvergenceError",
    "PhaseShiftTable",
    "CrossSectionCurve",
    "ScatteringLengthResult",
    "ZeroEnergyResult",
    "DEFAULT_V_GRID",
    "DEFAULT_L_MAX",
    "solve_radial",
    "tan_delta_two_point",
    "phase_shift",
    "phase_shift_table",
    "elastic_cross_section",
    "cross_section_curve",
    "unitarity_cross_section",
    "zero_energy_solution",
    "extract_scattering_length",
    "scattering_length",
    "centrifugal_barrier",
    "count_sign_changes",
]

# Velocity grid for cross-section curves: covers thermal relative speeds
# for 100-800 uK with negligible Maxwell-Boltzmann weight outside.
DEFAULT_V_GRID: np.ndarray = np.geomspace(0.01, 10.0, 60)
DEFAULT_L_MAX: int = 4

# |a| beyond this is treated as a resonance-pole artifact, not a value.
RESONANCE_LIMIT: float = 1.0e5 * BOHR_RADIUS

_PHASE_TOL: float = 1.0e-4      # rad, grid-convergence target for phase shifts
_TAIL_REL: float = 1.0e-6       # |V|/E at the matching radius
_MAX_HALVINGS: int = 4


class ConvergenceError(RuntimeError):
    """Grid refinement failed to converge; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@njit(cache=True)
def _numerov(f: np.ndarray, u0: float, u1: float) -> np.ndarray:
    """March u through f = 1 - h^2 g / 12 where u'' = g u.

    The returned array is unnormalized and may be rescaled in place to
    avoid overflow; signs and any contiguous window are still valid.
    """
    n = f.shape[0]
    u = np.empty(n)
    u[0] = u0
    u[1] = u1
    for i in range(1, n - 1):
        u[i + 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
        if abs(u[i + 1]) > 1.0e250:
            u[i] *= 1.0e-250
            u[i + 1] *= 1.0e-250
    return u


def count_sign_changes(u: np.ndarray) -> int:
    """Strict sign changes along u, ignoring exact zeros at the ends."""
    s = np.sign(u)
    s = s[s != 0.0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def solve_radial(
    potential,
    reduced_mass: float,
    energy: float,
    l: int,
    r_start: float,
    r_stop: float,
    h: float,
    u0: float = 0.0,
    u1: float = 1.0e-150,
) -> tuple[np.ndarray, np.ndarray]:
    """Outward Numerov integration; returns (r, u) on the uniform grid.

    ``potential`` is any callable accepting an r array in meters and
    returning energies in J.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    n = max(int(math.ceil((r_stop - r_start) / h)) + 1, 8)
    r = np.linspace(r_start, r_stop, n)
    step = r[1] - r[0]
    g = 2.0 * reduced_mass / HBAR**2 * (potential(r) - energy)
    if l > 0:
        g = g + l * (l + 1) / r**2
    f = 1.0 - step**2 / 12.0 * g
    u = _numerov(f, u0, u1)
    return r, u


def _riccati(l: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Riccati-Bessel pair (x j_l, x y_l)."""
    return x * spherical_jn(l, x), x * spherical_yn(l, x)


def tan_delta_two_point(
    k: float, l: int, r1: float, u1: float, r2: float, u2: float
) -> float:
    """tan(delta_l) from u at two radii in the force-free region."""
    j1, y1 = _riccati(l, np.asarray(k * r1))
    j2, y2 = _riccati(l, np.asarray(k * r2))
    num = j2 * u1 - j1 * u2
    den = y2 * u1 - y1 * u2
    return float(num / den)


def _energy_to_k(isotope: IsotopeParams, energy: float) -> float:
    return math.sqrt(2.0 * isotope.reduced_mass * energy) / HBAR


def _grid_step(pot, isotope: IsotopeParams, energy: float) -> float:
    # Resolve the fastest oscillation (well bottom) and the LJ scale.
    k_inner = math.sqrt(2.0 * isotope.reduced_mass * (energy + pot.depth)) / HBAR
    return min(2.0 * math.pi / (20.0 * k_inner), pot.r_minimum / 50.0)


def _matching_radius(pot, energy: float) -> float:
    # |V_tail| / E <= _TAIL_REL; never closer in than the pure-tail radius.
    r_neg = (pot.c6 / (_TAIL_REL * energy)) ** (1.0 / 6.0)
    return max(1.05 * pot.r_match, r_neg)


def _phase_shift_once(pot, isotope: IsotopeParams, energy: float, l: int, h: float):
    k = _energy_to_k(isotope, energy)
    r_stop = _matching_radius(pot, energy)
    r, u = solve_radial(pot.evaluate, isotope.reduced_mass, energy, l, pot.r_inner, r_stop, h)
    step = r[1] - r[0]
    span = r_stop - pot.r_inner
    delta_r = min(0.35 * span, max(2.0 * math.pi / (7.0 * k), 50.0 * step))
    i1 = len(r) - 1 - max(int(round(delta_r / step)), 5)
    if i1 < 2:
        i1 = len(r) // 2
    t = tan_delta_two_point(k, l, r[i1], u[i1], r[-1], u[-1])
    return t, math.atan(t)


def _mod_pi_distance(d1: float, d2: float) -> float:
    return abs((d1 - d2 + math.pi / 2.0) % math.pi - math.pi / 2.0)


def phase_shift(
    pot,
    isotope: IsotopeParams,
    energy: float,
    l: int,
    tol: float = _PHASE_TOL,
) -> float:
    """Scattering phase shift delta_l(E) in rad, principal value.

    The grid step is halved until two successive refinements agree to
    ``tol`` (mod pi); failure after four halvings raises
    :class:`ConvergenceError` with the achieved residual.  High partial
    waves below their centrifugal barrier need the extra refinements:
    step error seeded inside the well is amplified by the under-barrier
    growth of the regular solution.
    """
    if energy <= 0.0:
        raise ValueError("collision energy must be positive")
    h = _grid_step(pot, isotope, energy)
    _, prev = _phase_shift_once(pot, isotope, energy, l, h)
    residual = math.inf
    for _ in range(_MAX_HALVINGS):
        h *= 0.5
        _, cur = _phase_shift_once(pot, isotope, energy, l, h)
        residual = _mod_pi_distance(cur, prev)
        if residual <= tol:
            return cur
        prev = cur
    raise ConvergenceError(
        f"phase shift not grid-converged at E={energy:.3e} J, l={l}", residual
    )


@dataclass(frozen=True)
class PhaseShiftTable:
    """Phase shifts on a k grid, unwrapped to be continuous in k."""

    k: np.ndarray                 # 1/m, ascending
    l_values: tuple[int, ...]
    delta: np.ndarray             # rad, shape (n_l, n_k)

    def for_l(self, l: int) -> np.ndarray:
        return self.delta[self.l_values.index(l)]


@dataclass(frozen=True)
class CrossSectionCurve:
    """Elastic cross section versus relative speed for one potential."""

    v: np.ndarray                 # m/s, ascending
    sigma: np.ndarray             # m^2
    sigma_per_l: np.ndarray       # m^2, shape (n_l, n_v), cumulative in l
    l_values: tuple[int, ...]
    isotope_label: str
    a_nominal: float | None = None   # m, tuned scattering length if known

    @property
    def ln_v(self) -> np.ndarray:
        return np.log(self.v)

    def sigma_at(self, v: float) -> float:
        """Linear interpolation in ln v; clamped at the grid ends."""
        return float(np.interp(math.log(v), self.ln_v, self.sigma))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("v_mps,sigma_m2\n")
            for vi, si in zip(self.v, self.sigma):
                fh.write(f"{vi:.10g},{si:.10g}\n")


def phase_shift_table(
    pot,
    isotope: IsotopeParams,
    v_grid: np.ndarray | None = None,
    l_values: tuple[int, ...] = (0, 2, 4),
) -> PhaseShiftTable:
    """Convergence-checked phase shifts over a velocity grid."""
    v = DEFAULT_V_GRID if v_grid is None else np.asarray(v_grid, dtype=float)
    k = isotope.reduced_mass * v / HBAR
    energies = HBAR**2 * k**2 / (2.0 * isotope.reduced_mass)
    delta = np.empty((len(l_values), len(v)))
    for i, l in enumerate(l_values):
        for j, e in enumerate(energies):
            delta[i, j] = phase_shift(pot, isotope, float(e), l)
        delta[i] = np.unwrap(delta[i], period=math.pi)
    return PhaseShiftTable(k=k, l_values=tuple(l_values), delta=delta)


def elastic_cross_section(
    pot, isotope: IsotopeParams, v: float, l_max: int = DEFAULT_L_MAX
) -> float:
    """Identical-boson elastic cross section at relative speed v, m^2."""
    if not isotope.bosonic:
        raise ValueError("even-wave symmetrization requires a bosonic isotope")
    if v <= 0.0:
        raise ValueError("relative speed must be positive")
    k = isotope.reduced_mass * v / HBAR
    energy = HBAR**2 * k**2 / (2.0 * isotope.reduced_mass)
    total = 0.0
    for l in range(0, l_max + 1, 2):
        d = phase_shift(pot, isotope, energy, l)
        total += (2 * l + 1) * math.sin(d) ** 2
    return 8.0 * math.pi / k**2 * total


def cross_section_curve(
    pot,
    isotope: IsotopeParams,
    v_grid: np.ndarray | None = None,
    l_max: int = DEFAULT_L_MAX,
    a_nominal: float | None = None,
) -> CrossSectionCurve:
    """Cross-section curve over the velocity grid, one l at a time.

    ``sigma_per_l[i]`` holds the cumulative cross section through the
    i-th even partial wave; the last row equals ``sigma``.
    """
    if not isotope.bosonic:
        raise ValueError("even-wave symmetrization requires a bosonic isotope")
    v = DEFAULT_V_GRID if v_grid is None else np.asarray(v_grid, dtype=float)
    l_values = tuple(range(0, l_max + 1, 2))
    table = phase_shift_table(pot, isotope, v, l_values)
    k = table.k
    partial = np.empty((len(l_values), len(v)))
    for i, l in enumerate(l_values):
        partial[i] = (2 * l + 1) * np.sin(table.delta[i]) ** 2
    cumulative = 8.0 * math.pi / k**2 * np.cumsum(partial, axis=0)
    if a_nominal is None:
        a_nominal = getattr(pot, "a_target", None)
    return CrossSectionCurve(
        v=v,
        sigma=cumulative[-1],
        sigma_per_l=cumulative,
        l_values=l_values,
        isotope_label=isotope.label,
        a_nominal=a_nominal,
    )


def unitarity_cross_section(isotope: IsotopeParams, v: np.ndarray) -> np.ndarray:
    """s-wave unitarity bound 8 pi / k^2 at relative speed v."""
    k = isotope.reduced_mass * np.asarray(v, dtype=float) / HBAR
    return 8.0 * math.pi / k**2


# -- zero-energy solution and scattering length ------------------------------

_GAMMA_34 = float(gamma_fn(0.75))
_GAMMA_54 = float(gamma_fn(1.25))


@dataclass(frozen=True)
class ZeroEnergyResult:
    """Zero-energy s-wave solution summary."""

    a: float                  # m
    nodes: int                # s-wave bound-state count (Levinson)
    r_edge: float             # m, outer end of the numeric grid


def vdw_length(c6: float, reduced_mass: float) -> float:
    """van der Waals length beta6 = (2 mu C6 / hbar^2)^(1/4), m."""
    return (2.0 * reduced_mass * c6 / HBAR**2) ** 0.25


def mean_scattering_length(c6: float, reduced_mass: float) -> float:
    """Semiclassical mean scattering length of a -C6/r^6 tail, m."""
    beta6 = vdw_length(c6, reduced_mass)
    return beta6 * _GAMMA_34 / (2.0 * math.sqrt(2.0) * _GAMMA_54)


def zero_energy_solution(pot, isotope: IsotopeParams) -> ZeroEnergyResult:
    """Integrate u'' = (2 mu V / hbar^2) u at E = 0 and match the tail.

    Matching functions are sqrt(r) J_{+-1/4}(beta6^2 / 2 r^2), exact for
    the -C6/r^6 tail; their large-r limits are a constant and a linear
    ramp, so u -> B (r - a) fixes a without any finite-range error.  The
    node count of u (plus one if the asymptotic crossing at r = a lies
    beyond the grid) equals the s-wave bound-state count.
    """
    mu = isotope.reduced_mass
    beta6 = vdw_length(pot.c6, mu)
    r_edge = max(3.0 * beta6, 1.2 * pot.r_match)
    h = _grid_step(pot, isotope, 0.0)

    def tail_pair(radius: float) -> tuple[float, float]:
        y = beta6**2 / (2.0 * radius**2)
        return (
            math.sqrt(radius) * float(jv(0.25, y)),
            math.sqrt(radius) * float(jv(-0.25, y)),
        )

    def a_at_step(step_size: float) -> tuple[float, np.ndarray]:
        r, u = solve_radial(pot.evaluate, mu, 0.0, 0, pot.r_inner, r_edge, step_size)
        step = r[1] - r[0]
        i1 = len(r) - 1 - max(int(round(0.07 * r_edge / step)), 10)
        u11, u21 = tail_pair(r[i1])
        u12, u22 = tail_pair(r[-1])
        det = u11 * u22 - u12 * u21
        alpha = (u[i1] * u22 - u[-1] * u21) / det
        beta = (u[-1] * u11 - u[i1] * u12) / det
        c1 = math.sqrt(beta6 / 2.0) / _GAMMA_54
        c2 = math.sqrt(2.0 / beta6) / _GAMMA_34
        return -alpha * c1 / (beta * c2), u

    a_coarse, _ = a_at_step(h)
    a_fine, u = a_at_step(0.5 * h)
    a = a_fine + (a_fine - a_coarse) / 15.0

    nodes = count_sign_changes(u)
    if a > r_edge:
        nodes += 1
    return ZeroEnergyResult(a=float(a), nodes=nodes, r_edge=r_edge)


@dataclass(frozen=True)
class ScatteringLengthResult:
    """Richardson-extrapolated scattering length with an error estimate."""

    value: float              # m
    error: float              # m, from the last two extrapolation levels
    resonant: bool            # |a| beyond the resonance-pole threshold
    k_sequence: tuple[float, ...]
    samples: tuple[float, ...]   # -tan(delta_0)/k at each k


def _a_of_k(pot, isotope: IsotopeParams, k: float) -> float:
    """-tan(delta_0)/k with one in-h Richardson step (h^4 leading error)."""
    energy = HBAR**2 * k**2 / (2.0 * isotope.reduced_mass)
    h = _grid_step(pot, isotope, energy)
    t1, _ = _phase_shift_once(pot, isotope, energy, 0, h)
    t2, _ = _phase_shift_once(pot, isotope, energy, 0, 0.5 * h)
    a1 = -t1 / k
    a2 = -t2 / k
    return a2 + (a2 - a1) / 15.0


def extract_scattering_length(
    pot,
    isotope: IsotopeParams,
    k0: float | None = None,
    levels: int = 4,
) -> ScatteringLengthResult:
    """a = -lim_{k->0} tan(delta_0)/k via Richardson over descending k.

    The low-k error series starts at k^2; successive columns remove
    k^2, k^3, k^4.  The returned error is the spread of the last two
    extrapolation levels.
    """
    mu = isotope.reduced_mass
    beta6 = vdw_length(pot.c6, mu)
    if k0 is None:
        a_rough = abs(zero_energy_solution(pot, isotope).a)
        k0 = 0.06 / beta6
        if a_rough > 0.0:
            k0 = min(k0, 0.25 / a_rough)
    ks = [k0 / 2.0**i for i in range(levels)]
    table = [[_a_of_k(pot, isotope, k) for k in ks]]
    for p in (2.0, 3.0, 4.0)[: levels - 1]:
        prev = table[-1]
        fac = 2.0**p
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)])
    value = table[-1][-1]
    error = abs(table[-1][-1] - table[-2][-1])
    return ScatteringLengthResult(
        value=float(value),
        error=float(error),
        resonant=abs(value) > RESONANCE_LIMIT,
        k_sequence=tuple(ks),
        samples=tuple(table[0]),
    )


def scattering_length(pot, isotope: IsotopeParams) -> float:
    """Zero-energy scattering length of the tuned potential, m."""
    return extract_scattering_length(pot, isotope).value


def centrifugal_barrier(isotope: IsotopeParams, l: int) -> float:
    """Height of the centrifugal barrier over the -C6/r^6 tail, J.

    With B = hbar^2 l(l+1) / (2 mu) the barrier of B/r^2 - C6/r^6 peaks
    at U_max = (2B/3) sqrt(B / (3 C6)).  Returns 0 for l = 0 (no
    barrier) by convention.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    if l == 0:
        return 0.0
    b = HBAR**2 * l * (l + 1) / (2.0 * isotope.reduced_mass)
    return 2.0 * b / 3.0 * math.sqrt(b / (3.0 * isotope.c6))
