"""Direct-simulation Monte Carlo of a trapped cloud with elastic collisions.

Test particles move in the anisotropic harmonic trap under leapfrog
(kick-drift-kick) transport.  Pairwise elastic collisions are sampled
per spatial cell by no-time-counter candidate selection with acceptance
proportional to sigma_el(v_rel) * v_rel, scattering isotropically in the
center-of-mass frame; two-body loss removes pairs with a velocity-
independent local probability proportional to beta * n_local.

The simulation is the ground-truth oracle for the relaxation kernel
calibration, the gamma_rel proportionality to density, and the heating
relation: it knows nothing about effective cross sections or rate
equations.

All randomness is counter-based: every draw hashes (seed, step, cell,
counter), so traces replay bit-identically for a given seed and cell
processing order cannot change results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .constants import K_B
from .core import (
    IsotopeParams,
    Measurement,
    MeasurementSeries,
    ThermalState,
    TrapConfig,
    mean_density,
    mean_relative_velocity,
)
from .scattering import CrossSectionCurve

_MAX_DT_TRAP_FRACTION: float = 0.02   # dt <= this / omega_r
_MAX_DT_MFT_FRACTION: float = 0.1     # dt <= this * mean free time
_MIN_CELLS_PER_SIGMA: int = 4


# -- counter-based random stream ---------------------------------------------

_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xBF58476D1CE4E5B9)
_M3 = np.uint64(0x94D049BB133111EB)
_TAG_INIT = np.uint64(0x1234567800000001)
_TAG_STEP = np.uint64(0xABCDEF0100000002)


@njit(cache=True)
def _mix(z):
    z = (z + _M1) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(30))) * _M2) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * _M3) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _unit(key, ctr):
    """Uniform in (0, 1]; ctr distinguishes draws under one key."""
    h = _mix(key ^ _mix(np.uint64(ctr)))
    return (np.float64(h >> np.uint64(11)) + 1.0) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _normal_pair(key, ctr):
    u1 = _unit(key, ctr)
    u2 = _unit(key, ctr + 1)
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)


@njit(cache=True)
def _interp_log(v, ln_v, ln_sig):
    """sigma(v) from a log-log table, clamped at the ends."""
    x = math.log(v)
    n = ln_v.shape[0]
    if x <= ln_v[0]:
        return math.exp(ln_sig[0])
    if x >= ln_v[n - 1]:
        return math.exp(ln_sig[n - 1])
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ln_v[mid] <= x:
            lo = mid
        else:
            hi = mid
    f = (x - ln_v[lo]) / (ln_v[lo + 1] - ln_v[lo])
    return math.exp(ln_sig[lo] + f * (ln_sig[lo + 1] - ln_sig[lo]))


@njit(cache=True)
def _sigma_of(v, use_curve, sigma0, ln_v, ln_sig):
    if use_curve:
        return _interp_log(v, ln_v, ln_sig)
    return sigma0


# -- main advance loop -------------------------------------------------------

@njit(cache=True)
def _advance(
    seed,
    steps,
    dt,
    sample_every,
    x,
    v,
    weight,
    omega,
    grid_lo,
    inv_delta,
    ncells,
    cell_volume,
    use_curve,
    sigma0,
    ln_v_tab,
    ln_sig_tab,
    beta,
    maj0,
    mass,
    out_time,
    out_alive,
    out_tx,
    out_tr,
    out_aspect,
    out_nbar,
    out_coll,
    out_energy,
):
    n0 = x.shape[0]
    nx, ny, nz = ncells[0], ncells[1], ncells[2]
    ntot = nx * ny * nz
    maj = np.full(ntot, maj0)
    counts = np.zeros(ntot + 1, dtype=np.int64)
    start = np.zeros(ntot + 1, dtype=np.int64)
    order = np.empty(n0, dtype=np.int64)
    cellof = np.empty(n0, dtype=np.int64)
    dead = np.zeros(n0, dtype=np.uint8)
    # most recent collision partner; repeat pairings are redrawn because a
    # freshly scattered pair lingers in its cell for several steps and
    # re-colliding it only wastes the candidate on thermalized partners
    last_partner = np.full(n0, -1, dtype=np.int64)
    remap = np.empty(n0, dtype=np.int64)
    kx = 0.5 * mass * omega[0] * omega[0]
    kr = 0.5 * mass * omega[1] * omega[1]

    n_alive = n0
    coll_cum = 0
    base = _mix(np.uint64(seed) ^ _TAG_STEP)

    # Rows hold means over sampling windows, not instantaneous snapshots:
    # the harmonic trap never phase-mixes, so finite-sample kinetic /
    # potential imbalance rings undamped at twice the trap frequencies,
    # and snapshots alias that ring into slow spurious drifts.  Row 0 is
    # the exact initial state.
    acc_t = 0.0
    acc_vvx = 0.0
    acc_vvy = 0.0
    acc_vvz = 0.0
    acc_xx = 0.0
    acc_rr = 0.0
    acc_nbar = 0.0
    acc_e = 0.0
    acc_n = 0

    row = 0
    for s in range(-1, steps):
        if s >= 0:
            # kick-drift-kick
            half = 0.5 * dt
            for i in range(n_alive):
                v[i, 0] -= omega[0] * omega[0] * x[i, 0] * half
                v[i, 1] -= omega[1] * omega[1] * x[i, 1] * half
                v[i, 2] -= omega[2] * omega[2] * x[i, 2] * half
                x[i, 0] += v[i, 0] * dt
                x[i, 1] += v[i, 1] * dt
                x[i, 2] += v[i, 2] * dt
                v[i, 0] -= omega[0] * omega[0] * x[i, 0] * half
                v[i, 1] -= omega[1] * omega[1] * x[i, 1] * half
                v[i, 2] -= omega[2] * omega[2] * x[i, 2] * half

        # bin into cells (counting sort)
        for c in range(ntot + 1):
            counts[c] = 0
        for i in range(n_alive):
            cxi = int((x[i, 0] - grid_lo[0]) * inv_delta[0])
            cyi = int((x[i, 1] - grid_lo[1]) * inv_delta[1])
            czi = int((x[i, 2] - grid_lo[2]) * inv_delta[2])
            if cxi < 0:
                cxi = 0
            if cxi >= nx:
                cxi = nx - 1
            if cyi < 0:
                cyi = 0
            if cyi >= ny:
                cyi = ny - 1
            if czi < 0:
                czi = 0
            if czi >= nz:
                czi = nz - 1
            c = cxi + nx * (cyi + ny * czi)
            cellof[i] = c
            counts[c + 1] += 1
        start[0] = 0
        for c in range(ntot):
            start[c + 1] = start[c] + counts[c + 1]
        for c in range(ntot + 1):
            counts[c] = start[c]
        for i in range(n_alive):
            c = cellof[i]
            order[counts[c]] = i
            counts[c] += 1

        if s >= 0:
            coll_cum += _collide_and_lose(
                s,
                base,
                start,
                order,
                ntot,
                v,
                dead,
                last_partner,
                maj,
                beta,
                weight,
                dt,
                cell_volume,
                use_curve,
                sigma0,
                ln_v_tab,
                ln_sig_tab,
            )

            # compact removed particles, preserving index order
            if beta > 0.0:
                k = 0
                for i in range(n_alive):
                    if dead[i] == 0:
                        remap[i] = k
                        if k != i:
                            x[k, 0] = x[i, 0]
                            x[k, 1] = x[i, 1]
                            x[k, 2] = x[i, 2]
                            v[k, 0] = v[i, 0]
                            v[k, 1] = v[i, 1]
                            v[k, 2] = v[i, 2]
                        k += 1
                    else:
                        remap[i] = -1
                        dead[i] = 0
                for i in range(n_alive):
                    if remap[i] >= 0:
                        p = last_partner[i]
                        last_partner[remap[i]] = remap[p] if p >= 0 else -1
                n_alive = k
                # cell lists are stale after compaction; they are rebuilt
                # next step before any use

        # accumulate this step's moments
        svx = 0.0
        svy = 0.0
        svz = 0.0
        svx2 = 0.0
        svy2 = 0.0
        svz2 = 0.0
        sxx = 0.0
        srr = 0.0
        energy = 0.0
        for i in range(n_alive):
            svx += v[i, 0]
            svy += v[i, 1]
            svz += v[i, 2]
            svx2 += v[i, 0] * v[i, 0]
            svy2 += v[i, 1] * v[i, 1]
            svz2 += v[i, 2] * v[i, 2]
            sxx += x[i, 0] * x[i, 0]
            srr += x[i, 1] * x[i, 1] + x[i, 2] * x[i, 2]
            energy += 0.5 * mass * (
                v[i, 0] ** 2 + v[i, 1] ** 2 + v[i, 2] ** 2
            ) + kx * x[i, 0] ** 2 + kr * (x[i, 1] ** 2 + x[i, 2] ** 2)
        fn = float(n_alive) if n_alive > 0 else 1.0
        pair_sum = 0.0
        for c in range(ntot):
            ncc = start[c + 1] - start[c]
            pair_sum += float(ncc) * float(ncc - 1)

        acc_t += (s + 1) * dt
        acc_vvx += svx2 / fn - (svx / fn) ** 2
        acc_vvy += svy2 / fn - (svy / fn) ** 2
        acc_vvz += svz2 / fn - (svz / fn) ** 2
        acc_xx += sxx / fn
        acc_rr += 0.5 * srr / fn
        acc_nbar += weight * pair_sum / cell_volume / fn
        acc_e += energy
        acc_n += 1

        if s == -1 or (s + 1) % sample_every == 0 or s == steps - 1:
            fa = float(acc_n)
            out_time[row] = acc_t / fa
            out_alive[row] = n_alive
            out_tx[row] = mass * (acc_vvx / fa) / K_B
            out_tr[row] = mass * 0.5 * (acc_vvy / fa + acc_vvz / fa) / K_B
            rr = acc_rr / fa
            out_aspect[row] = math.sqrt((acc_xx / fa) / rr) if rr > 0.0 else 0.0
            out_nbar[row] = acc_nbar / fa
            out_coll[row] = coll_cum
            out_energy[row] = acc_e / fa
            row += 1
            acc_t = 0.0
            acc_vvx = 0.0
            acc_vvy = 0.0
            acc_vvz = 0.0
            acc_xx = 0.0
            acc_rr = 0.0
            acc_nbar = 0.0
            acc_e = 0.0
            acc_n = 0

    return row


@njit(cache=True)
def _collide_and_lose(
    s,
    base,
    start,
    order,
    ntot,
    v,
    dead,
    last_partner,
    maj,
    beta,
    weight,
    dt,
    cell_volume,
    use_curve,
    sigma0,
    ln_v_tab,
    ln_sig_tab,
):
    step_key = base ^ _mix(np.uint64(s))
    pair_factor = weight * dt / cell_volume
    naccept = 0

    for c in range(ntot):
            i0 = start[c]
            i1 = start[c + 1]
            nc = i1 - i0
            if nc < 2:
                continue
            ckey = _mix(step_key ^ _mix(np.uint64(c)))
            ctr = 0
            npairs = 0.5 * float(nc) * float(nc - 1)

            if beta > 0.0:
                m_loss_f = npairs * beta * pair_factor
                m_loss = int(m_loss_f)
                if _unit(ckey, ctr) < m_loss_f - m_loss:
                    m_loss += 1
                ctr += 1
                for _ in range(m_loss):
                    ia = i0 + int(_unit(ckey, ctr) * nc)
                    if ia >= i1:
                        ia = i1 - 1
                    jb = int(_unit(ckey, ctr + 1) * (nc - 1))
                    if jb >= nc - 1:
                        jb = nc - 2
                    ib = i0 + jb
                    if ib >= ia:
                        ib += 1
                    ctr += 2
                    pa = order[ia]
                    pb = order[ib]
                    if dead[pa] == 1 or dead[pb] == 1:
                        continue
                    dead[pa] = 1
                    dead[pb] = 1

            m_cand_f = npairs * maj[c] * pair_factor
            m_cand = int(m_cand_f)
            if _unit(ckey, ctr) < m_cand_f - m_cand:
                m_cand += 1
            ctr += 1
            for _ in range(m_cand):
                pa = -1
                pb = -1
                for _attempt in range(4):
                    ia = i0 + int(_unit(ckey, ctr) * nc)
                    if ia >= i1:
                        ia = i1 - 1
                    jb = int(_unit(ckey, ctr + 1) * (nc - 1))
                    if jb >= nc - 1:
                        jb = nc - 2
                    ib = i0 + jb
                    if ib >= ia:
                        ib += 1
                    ctr += 2
                    pa = order[ia]
                    pb = order[ib]
                    if nc == 2 or last_partner[pa] != pb or last_partner[pb] != pa:
                        break
                u_acc = _unit(ckey, ctr)
                ctr += 1
                if last_partner[pa] == pb and last_partner[pb] == pa and nc > 2:
                    continue
                if dead[pa] == 1 or dead[pb] == 1:
                    continue
                dvx = v[pa, 0] - v[pb, 0]
                dvy = v[pa, 1] - v[pb, 1]
                dvz = v[pa, 2] - v[pb, 2]
                vrel = math.sqrt(dvx * dvx + dvy * dvy + dvz * dvz)
                if vrel <= 0.0:
                    continue
                sv = _sigma_of(vrel, use_curve, sigma0, ln_v_tab, ln_sig_tab) * vrel
                if sv > maj[c]:
                    maj[c] = 1.2 * sv
                if u_acc * maj[c] >= sv:
                    continue
                # isotropic center-of-mass scatter
                cos_t = 1.0 - 2.0 * _unit(ckey, ctr)
                phi = 2.0 * math.pi * _unit(ckey, ctr + 1)
                ctr += 2
                sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
                rx = vrel * sin_t * math.cos(phi)
                ry = vrel * sin_t * math.sin(phi)
                rz = vrel * cos_t
                cmx = 0.5 * (v[pa, 0] + v[pb, 0])
                cmy = 0.5 * (v[pa, 1] + v[pb, 1])
                cmz = 0.5 * (v[pa, 2] + v[pb, 2])
                v[pa, 0] = cmx + 0.5 * rx
                v[pa, 1] = cmy + 0.5 * ry
                v[pa, 2] = cmz + 0.5 * rz
                v[pb, 0] = cmx - 0.5 * rx
                v[pb, 1] = cmy - 0.5 * ry
                v[pb, 2] = cmz - 0.5 * rz
                last_partner[pa] = pb
                last_partner[pb] = pa
                naccept += 1

    return naccept


@njit(cache=True)
def _standardize_axes(arr, sig):
    n = arr.shape[0]
    for ax in range(3):
        mean = 0.0
        for i in range(n):
            mean += arr[i, ax]
        mean /= n
        var = 0.0
        for i in range(n):
            var += (arr[i, ax] - mean) ** 2
        var /= n
        scale = sig[ax] / math.sqrt(var) if var > 0.0 else 1.0
        for i in range(n):
            arr[i, ax] = (arr[i, ax] - mean) * scale


@njit(cache=True)
def _init_particles(seed, n, sig_pos, sig_vel):
    x = np.empty((n, 3))
    v = np.empty((n, 3))
    key = _mix(np.uint64(seed) ^ _TAG_INIT)
    for i in range(n):
        pk = _mix(key ^ _mix(np.uint64(i)))
        g0, g1 = _normal_pair(pk, 0)
        g2, g3 = _normal_pair(pk, 2)
        g4, g5 = _normal_pair(pk, 4)
        x[i, 0] = sig_pos[0] * g0
        x[i, 1] = sig_pos[1] * g1
        x[i, 2] = sig_pos[2] * g2
        v[i, 0] = sig_vel[0] * g3
        v[i, 1] = sig_vel[1] * g4
        v[i, 2] = sig_vel[2] * g5
    # quiet start: pin each axis to its nominal mean and variance, so the
    # realized ensemble carries no frozen few-per-mil offsets that would
    # otherwise relax on the same timescale as the signal under study
    _standardize_axes(x, sig_pos)
    _standardize_axes(v, sig_vel)
    # also project out the sample x-v correlation per axis; any residual
    # seeds a coherent breathing mode that the trap alone never damps
    for ax in range(3):
        sxv = 0.0
        sxx = 0.0
        for i in range(n):
            sxv += x[i, ax] * v[i, ax]
            sxx += x[i, ax] * x[i, ax]
        slope = sxv / sxx if sxx > 0.0 else 0.0
        for i in range(n):
            v[i, ax] -= slope * x[i, ax]
    _standardize_axes(v, sig_vel)
    return x, v


# -- configuration and trace -------------------------------------------------

class SimConfigError(ValueError):
    """Raised when a simulation configuration violates its resolution limits."""


@dataclass(frozen=True)
class SimConfig:
    """Particle-simulation setup.

    Exactly one of ``sigma0`` (constant cross section) or ``curve``
    (velocity-dependent table) must be given.  ``dt=None`` picks the
    largest step obeying both resolution limits.
    """

    n_test: int
    weight: float
    isotope: IsotopeParams
    trap: TrapConfig
    sigma0: float | None = None
    curve: CrossSectionCurve | None = None
    beta: float = 0.0
    dt: float | None = None
    cells_per_sigma: int = 4
    extent_sigmas: float = 4.0
    sample_rows: int = 400
    seed: int = 1

    def __post_init__(self) -> None:
        if self.n_test < 2:
            raise SimConfigError("need at least 2 test particles")
        if self.weight <= 0.0:
            raise SimConfigError("statistical weight must be positive")
        if (self.sigma0 is None) == (self.curve is None):
            raise SimConfigError("give exactly one of sigma0 or curve")
        if self.sigma0 is not None and self.sigma0 < 0.0:
            raise SimConfigError("sigma0 must be nonnegative")
        if self.beta < 0.0:
            raise SimConfigError("beta must be nonnegative")
        if self.cells_per_sigma < _MIN_CELLS_PER_SIGMA:
            raise SimConfigError(
                f"cells must resolve sigma/{_MIN_CELLS_PER_SIGMA}"
            )


@dataclass(frozen=True)
class SimTrace:
    """Sampled time series of one simulation run."""

    time: np.ndarray            # s
    atom_number: np.ndarray     # real atoms (alive * weight)
    t_x: np.ndarray             # K
    t_r: np.ndarray             # K
    aspect: np.ndarray          # cloud aspect ratio sigma_x / sigma_r
    density: np.ndarray         # 1/m^3, cell-binned mean density
    collisions: np.ndarray      # cumulative accepted collisions
    energy: np.ndarray          # J, total of all alive test particles
    config: SimConfig
    isotope: IsotopeParams
    trap: TrapConfig

    @property
    def t_mean(self) -> np.ndarray:
        return (self.t_x + 2.0 * self.t_r) / 3.0

    def to_series(self) -> MeasurementSeries:
        """Re-emit the trace in the measurement-series schema.

        Uncertainty columns carry the test-particle sampling noise.
        """
        records = []
        for i in range(self.time.size):
            n_test = max(self.atom_number[i] / self.config.weight, 1.0)
            rel = math.sqrt(2.0 / n_test)
            records.append(
                Measurement(
                    t=float(self.time[i]),
                    atom_number=float(self.atom_number[i]),
                    sigma_n=float(self.config.weight * math.sqrt(n_test)),
                    t_x=float(self.t_x[i]),
                    sigma_tx=float(self.t_x[i] * rel),
                    t_r=float(self.t_r[i]),
                    sigma_tr=float(self.t_r[i] * rel),
                )
            )
        return MeasurementSeries(
            records=tuple(records), trap=self.trap, isotope=self.isotope
        )

    def to_csv(self, path) -> None:
        header = "t_s,N,Tx_K,Tr_K,aspect,nbar_m3,collisions,energy_J"
        data = np.column_stack(
            [
                self.time,
                self.atom_number,
                self.t_x,
                self.t_r,
                self.aspect,
                self.density,
                self.collisions,
                self.energy,
            ]
        )
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.10g")


def max_time_step(config: SimConfig, initial: ThermalState) -> float:
    """Largest dt obeying the trap-period and mean-free-time limits."""
    dt_trap = _MAX_DT_TRAP_FRACTION / max(config.trap.omega_x, config.trap.omega_r)
    vbar = mean_relative_velocity(initial)
    if config.sigma0 is not None:
        sigma_ref = config.sigma0
    else:
        sigma_ref = config.curve.sigma_at(vbar)
    rate = mean_density(initial) * sigma_ref * vbar
    if rate <= 0.0:
        return dt_trap
    return min(dt_trap, _MAX_DT_MFT_FRACTION / rate)


def run(config: SimConfig, initial: ThermalState, duration: float) -> SimTrace:
    """Advance the simulation from a thermal state for the given duration."""
    dt_max = max_time_step(config, initial)
    dt = dt_max if config.dt is None else config.dt
    if dt > dt_max * (1.0 + 1.0e-12):
        raise SimConfigError(
            f"dt={dt:.3e} s exceeds the resolution limit {dt_max:.3e} s"
        )
    if duration <= 0.0:
        raise ValueError("duration must be positive")

    iso = config.isotope
    trap = config.trap
    mass = iso.mass
    sig_x = initial.sigma_x
    sig_r = initial.sigma_r
    sig_pos = np.array([sig_x, sig_r, sig_r])
    sig_vel = np.array(
        [
            math.sqrt(K_B * initial.t_x / mass),
            math.sqrt(K_B * initial.t_r / mass),
            math.sqrt(K_B * initial.t_r / mass),
        ]
    )
    omega = np.array([trap.omega_x, trap.omega_r, trap.omega_r])

    delta = sig_pos / config.cells_per_sigma
    half_span = config.extent_sigmas * sig_pos
    ncells = np.maximum(
        (2.0 * half_span / delta + 0.5).astype(np.int64), 2
    )
    grid_lo = -half_span
    inv_delta = 1.0 / delta
    cell_volume = float(np.prod(delta))

    if config.curve is not None:
        ln_v_tab = np.ascontiguousarray(config.curve.ln_v)
        ln_sig_tab = np.log(np.ascontiguousarray(config.curve.sigma))
        use_curve = True
        sigma0 = 0.0
        maj0 = float(np.max(config.curve.sigma * config.curve.v))
    else:
        ln_v_tab = np.zeros(2)
        ln_sig_tab = np.zeros(2)
        use_curve = False
        sigma0 = float(config.sigma0)
        maj0 = sigma0 * 5.0 * mean_relative_velocity(initial)

    steps = max(int(round(duration / dt)), 1)
    sample_every = max(steps // config.sample_rows, 1)
    n_rows = steps // sample_every + 1 + (1 if steps % sample_every else 0)

    x, v = _init_particles(config.seed, config.n_test, sig_pos, sig_vel)
    out_time = np.empty(n_rows)
    out_alive = np.empty(n_rows, dtype=np.int64)
    out_tx = np.empty(n_rows)
    out_tr = np.empty(n_rows)
    out_aspect = np.empty(n_rows)
    out_nbar = np.empty(n_rows)
    out_coll = np.empty(n_rows, dtype=np.int64)
    out_energy = np.empty(n_rows)

    rows = _advance(
        config.seed,
        steps,
        dt,
        sample_every,
        x,
        v,
        config.weight,
        omega,
        grid_lo,
        inv_delta,
        ncells,
        cell_volume,
        use_curve,
        sigma0,
        ln_v_tab,
        ln_sig_tab,
        config.beta,
        maj0,
        mass,
        out_time,
        out_alive,
        out_tx,
        out_tr,
        out_aspect,
        out_nbar,
        out_coll,
        out_energy,
    )
    sl = slice(0, rows)
    return SimTrace(
        time=out_time[sl].copy(),
        atom_number=out_alive[sl] * config.weight,
        t_x=out_tx[sl],
        t_r=out_tr[sl],
        aspect=out_aspect[sl],
        density=out_nbar[sl],
        collisions=out_coll[sl].copy(),
        energy=out_energy[sl],
        config=config,
        isotope=iso,
        trap=trap,
    )


# -- trace analysis ----------------------------------------------------------

@dataclass(frozen=True)
class GammaFit:
    """Exponential fit of the aspect-ratio trace."""

    gamma_rel: float          # 1/s, in rescaled time
    gamma_err: float
    a_eq: float
    a0: float
    r_squared: float
    e_foldings: float
    under_relaxed: bool


def measure_gamma_rel(
    trace: SimTrace,
    rescaled: bool = True,
    fix_a_eq: float | None = None,
) -> GammaFit:
    """Fit A(t) = A_eq + (A0 - A_eq) exp(-gamma t) to a trace.

    With ``rescaled`` the fit runs against collision-rate-rescaled time,
    compensating density and temperature drift from loss or heating; the
    returned rate then refers to the initial n * v.  ``fix_a_eq`` pins
    the asymptote, which removes the gamma / A_eq trade-off when the
    equilibrium is known (loss-free runs conserve the mean temperature).
    """
    from scipy.optimize import curve_fit

    t = trace.time
    a = trace.aspect
    if rescaled:
        vbar = np.sqrt(
            16.0 * K_B * trace.t_mean / (math.pi * trace.isotope.mass)
        )
        rate = trace.density * vbar
        t = np.concatenate(
            [[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(t))]
        ) / rate[0]

    span = t[-1] - t[0]
    if fix_a_eq is None:

        def model(tt, gamma, a_eq, a0):
            return a_eq + (a0 - a_eq) * np.exp(-gamma * tt)

        p0 = (3.0 / span, a[-1], a[0])
        popt, pcov = curve_fit(model, t, a, p0=p0, maxfev=10000)
        gamma, a_eq, a0 = (float(q) for q in popt)
        gamma_err = float(np.sqrt(pcov[0, 0]))
        resid = a - model(t, *popt)
    else:
        a_eq = float(fix_a_eq)

        def model(tt, gamma, a0):
            return a_eq + (a0 - a_eq) * np.exp(-gamma * tt)

        p0 = (3.0 / span, a[0])
        popt, pcov = curve_fit(model, t, a, p0=p0, maxfev=10000)
        gamma, a0 = float(popt[0]), float(popt[1])
        gamma_err = float(np.sqrt(pcov[0, 0]))
        resid = a - model(t, *popt)

    ss_tot = float(np.sum((a - a.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 0.0
    e_folds = gamma * span
    return GammaFit(
        gamma_rel=gamma,
        gamma_err=gamma_err,
        a_eq=a_eq,
        a0=a0,
        r_squared=r2,
        e_foldings=e_folds,
        under_relaxed=e_folds < 2.0,
    )
