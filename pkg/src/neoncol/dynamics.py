"""Trap dynamics: aspect-ratio relaxation, two-body decay, intrinsic heating.

Three deterministic models used both to generate synthetic measurement
series and to linearize real ones for fitting:

* exponential relaxation of the cloud aspect ratio toward equilibrium,
* particle-number decay dN/dt = -alpha N - beta N^2 / V_eff with the
  effective volume growing as the cloud heats,
* the heating closure dT/dt = T beta nbar / 4, which follows from lost
  atoms carrying away less than the ensemble-average energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    Measurement,
    MeasurementSeries,
    ThermalState,
    effective_volume,
    mean_density,
    mean_relative_velocity,
    mean_temperature,
)

_ODE_RTOL: float = 1.0e-8


@dataclass(frozen=True)
class RelaxationModel:
    """Exponential approach of the aspect ratio to its equilibrium value."""

    gamma_rel: float          # 1/s
    a_eq: float
    a0: float

    def __post_init__(self) -> None:
        if self.gamma_rel < 0.0:
            raise ValueError("gamma_rel must be nonnegative")


def evolve_aspect(model: RelaxationModel, t) -> np.ndarray | float:
    """A(t) = A_eq + (A0 - A_eq) exp(-gamma_rel t)."""
    t = np.asarray(t, dtype=float)
    out = model.a_eq + (model.a0 - model.a_eq) * np.exp(-model.gamma_rel * t)
    return float(out) if out.ndim == 0 else out


def running_integral(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Cumulative integral of positive samples f(t), log-mean per segment.

    The logarithmic mean of the segment endpoints is exact when f varies
    exponentially between samples; the density of a decaying cloud does,
    and a plain trapezoid can overshoot by several percent on grids that
    sample less than one density e-fold.  Near-equal endpoints fall back
    to the arithmetic mean.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0.0) or not np.all(np.isfinite(f)):
        raise ValueError("samples must be positive and finite")
    a, b = f[:-1], f[1:]
    log_ratio = np.log(b / a)
    flat = np.abs(log_ratio) < 1.0e-6
    mean = np.where(flat, 0.5 * (a + b), (b - a) / np.where(flat, 1.0, log_ratio))
    return np.concatenate([[0.0], np.cumsum(mean * np.diff(t))])


def rescale_time(series: MeasurementSeries) -> np.ndarray:
    """Collision-rate-rescaled time t*.

    t*(t) = integral of n(t') v(t') / (n(0) v(0)) dt' over the sampled
    records.  Compensates density and temperature drift when fitting the
    relaxation model to slowly decaying clouds.
    """
    states = series.states()
    rate = np.array([mean_density(s) * mean_relative_velocity(s) for s in states])
    if not np.all(np.isfinite(rate)):
        raise ValueError("densities and temperatures must be finite")
    t = series.times()
    return running_integral(t, rate) / rate[0]


@dataclass(frozen=True)
class DecayModel:
    """Two-body decay of a trapped cloud with optional heating.

    ``heating`` is "none", "intrinsic", or a (t, T_mean) sample table;
    in the tabulated mode both trap temperatures are scaled by
    T_mean(t)/T_mean(0) and only the atom number is integrated.
    """

    alpha: float              # 1/s
    beta: float               # m^3/s
    initial: ThermalState
    heating: object = "none"

    def __post_init__(self) -> None:
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("loss coefficients must be nonnegative")
        if isinstance(self.heating, str):
            if self.heating not in ("none", "intrinsic"):
                raise ValueError(f"unknown heating law {self.heating!r}")
        else:
            t_tab, tm_tab = self.heating
            if len(t_tab) != len(tm_tab) or len(t_tab) < 2:
                raise ValueError("tabulated heating needs matching (t, T) samples")


@dataclass(frozen=True)
class DecayTrajectory:
    """evolve_decay output on the requested time grid."""

    time: np.ndarray
    atom_number: np.ndarray
    t_x: np.ndarray
    t_r: np.ndarray
    trap: object
    isotope: object

    @property
    def t_mean(self) -> np.ndarray:
        return (self.t_x + 2.0 * self.t_r) / 3.0

    def states(self) -> list[ThermalState]:
        return [
            ThermalState(
                atom_number=float(n),
                t_x=float(tx),
                t_r=float(tr),
                trap=self.trap,
                isotope=self.isotope,
            )
            for n, tx, tr in zip(self.atom_number, self.t_x, self.t_r)
        ]

    @property
    def density(self) -> np.ndarray:
        return np.array([mean_density(s) for s in self.states()])


def evolve_decay(model: DecayModel, t_grid: Sequence[float]) -> DecayTrajectory:
    """Integrate the decay ODE over t_grid (increasing from 0)."""
    t = np.asarray(t_grid, dtype=float)
    if t.size < 1 or t[0] != 0.0 or np.any(np.diff(t) <= 0.0):
        raise ValueError("time grid must increase from 0")
    s0 = model.initial
    tabulated = not isinstance(model.heating, str)
    if tabulated:
        t_tab = np.asarray(model.heating[0], dtype=float)
        tm_tab = np.asarray(model.heating[1], dtype=float)
        tm0 = np.interp(0.0, t_tab, tm_tab)

    def volume(time: float, t_x: float, t_r: float) -> float:
        if tabulated:
            scale = np.interp(time, t_tab, tm_tab) / tm0
            t_x, t_r = s0.t_x * scale, s0.t_r * scale
        return effective_volume(replace(s0, t_x=t_x, t_r=t_r))

    def rhs(time: float, y: np.ndarray) -> list[float]:
        n, t_x, t_r = y
        v_eff = volume(time, t_x, t_r)
        nbar = n / v_eff
        dn = -model.alpha * n - model.beta * nbar * n
        if model.heating == "intrinsic":
            rate = model.beta * nbar / 4.0
            return [dn, t_x * rate, t_r * rate]
        return [dn, 0.0, 0.0]

    y0 = [s0.atom_number, s0.t_x, s0.t_r]
    sol = solve_ivp(
        rhs,
        (0.0, float(t[-1])) if t[-1] > 0.0 else (0.0, 1.0),
        y0,
        t_eval=t,
        rtol=_ODE_RTOL,
        atol=[1.0e-12 * s0.atom_number, 1.0e-12 * s0.t_x, 1.0e-12 * s0.t_r],
        method="RK45",
    )
    if not sol.success:
        raise RuntimeError(f"decay integration failed: {sol.message}")
    n, t_x, t_r = sol.y
    if tabulated:
        scale = np.interp(t, t_tab, tm_tab) / tm0
        t_x, t_r = s0.t_x * scale, s0.t_r * scale
    return DecayTrajectory(
        time=t, atom_number=n, t_x=t_x, t_r=t_r, trap=s0.trap, isotope=s0.isotope
    )


def linearized_observables(series: MeasurementSeries) -> tuple[np.ndarray, np.ndarray]:
    """Map a decay series onto the straight line y = -alpha - beta x.

    y = log(N(t)/N(0)) / t and x = (1/t) * integral of nbar dt', both
    relative to the first record; that record itself is excluded from
    the output.
    """
    if len(series.records) < 3:
        raise ValueError("need at least 3 records")
    n = np.array([r.atom_number for r in series.records])
    if np.any(n <= 0.0):
        raise ValueError("atom numbers must be positive")
    t = series.times()
    t_rel = t - t[0]
    nbar = np.array([mean_density(s) for s in series.states()])
    y = np.log(n[1:] / n[0]) / t_rel[1:]
    x = running_integral(t, nbar)[1:] / t_rel[1:]
    return x, y


def intrinsic_heating_rate(state: ThermalState, beta: float) -> float:
    """dT/dt = T beta nbar / 4, K/s.

    A two-body loss event removes atoms with below-average total energy
    (losses concentrate where the density is highest, near the trap
    center), so the remaining cloud heats at a quarter of the per-atom
    loss rate.
    """
    return mean_temperature(state) * beta * mean_density(state) / 4.0


def synthetic_decay_series(
    model: DecayModel,
    t_grid: Sequence[float],
    rng: np.random.Generator | None = None,
    noise: float = 0.03,
) -> MeasurementSeries:
    """Decay trajectory re-emitted as a measurement series with noise.

    Relative Gaussian noise is applied to atom numbers and temperatures;
    the per-record uncertainty columns carry the same relative level.
    Output uses the core CSV schema, closing the generate-ingest-fit loop.
    """
    traj = evolve_decay(model, t_grid)
    if rng is None:
        rng = np.random.default_rng()
    records = []
    for i in range(traj.time.size):
        n = traj.atom_number[i]
        t_x = traj.t_x[i]
        t_r = traj.t_r[i]
        if noise > 0.0:
            n = n * (1.0 + noise * rng.standard_normal())
            t_x = t_x * (1.0 + noise * rng.standard_normal())
            t_r = t_r * (1.0 + noise * rng.standard_normal())
        records.append(
            Measurement(
                t=float(traj.time[i]),
                atom_number=float(n),
                sigma_n=float(noise * traj.atom_number[i]) if noise > 0.0 else 0.0,
                t_x=float(t_x),
                sigma_tx=float(noise * traj.t_x[i]) if noise > 0.0 else 0.0,
                t_r=float(t_r),
                sigma_tr=float(noise * traj.t_r[i]) if noise > 0.0 else 0.0,
            )
        )
    return MeasurementSeries(
        records=tuple(records), trap=model.initial.trap, isotope=model.initial.isotope
    )
