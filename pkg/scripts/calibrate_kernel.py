"""Calibrate the relaxation kernel against the particle simulation.

Runs cross-dimensional relaxation with two reference cross sections
whose trap rates are known in closed form:

  constant sigma      gamma = 0.400 * nbar sigma vbar_rel   (N_coll = 2.5)
  sigma = s / v       gamma = 0.250 * nbar s                (Maxwell molecules)

and fits gamma over windows of increasing depth.  The initial slope of
the relaxation reproduces the brackets; fits over several e-folds drift
low because the outer, dilute part of the cloud relaxes slower and the
second-moment observable weights it.  The ratio of the two brackets,
0.250 / 0.400 = 5/8, equals the Gamma-function factor c(p) of the
v^p-weighted thermal average at p = 5, which fixes the weight exponent;
the overall rate factor is normalization only and is taken from the
measured rethermalization collision number.

Usage: python3 scripts/calibrate_kernel.py [--seeds N] [--efolds X]
                                           [--n-test N] [--out DIR]
"""
from __future__ import annotations

import argparse
import math
from pathlib import Path

import numpy as np
from scipy.optimize import curve_fit
from scipy.special import gamma as gamma_fn

from neoncol.core import (
    ThermalState,
    default_trap,
    mean_density,
    mean_relative_velocity,
    neon_isotope,
)
from neoncol.dsmc import SimConfig, run
from neoncol.scattering import CrossSectionCurve
from neoncol.thermal import RELAXATION_POWER, RETHERMALIZATION_COLLISIONS

BRACKET_CONST = 0.400
BRACKET_INV_V = 0.250
WINDOWS = (0.5, 1.0, 2.0, 3.0, 5.0)


def c_of_p(p: float) -> float:
    """<v>_p / vbar_rel: the kernel's velocity-weighting factor.

    Equals (2/sqrt(pi)) Gamma((p+2)/2) / Gamma((p+3)/2); c(5) = 5/8.
    """
    return 2.0 / math.sqrt(math.pi) * gamma_fn((p + 2.0) / 2.0) / gamma_fn((p + 3.0) / 2.0)


def windowed_fit(trace, a_eq: float, gamma_nom: float) -> dict[float, tuple[float, float]]:
    """Pinned-equilibrium exponential fits over nested depth windows."""
    out = {}
    t, a = trace.time, trace.aspect

    def model(tt, g, a0):
        return a_eq + (a0 - a_eq) * np.exp(-g * tt)

    for efold in WINDOWS:
        m = t <= efold / gamma_nom
        if m.sum() < 10:
            continue
        p, cov = curve_fit(model, t[m], a[m], p0=(gamma_nom, a[0]))
        out[efold] = (float(p[0]), float(math.sqrt(cov[0, 0])))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3, help="independent runs per case")
    ap.add_argument("--efolds", type=float, default=5.0, help="nominal run depth")
    ap.add_argument("--n-test", type=int, default=20000)
    ap.add_argument("--out", default=None, help="write window table CSV here")
    args = ap.parse_args()

    iso = neon_isotope(20)
    trap = default_trap()
    a_eq = trap.omega_r / trap.omega_x
    state = ThermalState(2.0e8, 650e-6, 500e-6, trap, iso)
    weight = state.atom_number / args.n_test
    nbar = mean_density(state)
    vbar = mean_relative_velocity(state)

    print("velocity-weighting factor c(p) = <v>_p / vbar:")
    for p in (1.0, 3.0, 5.0, 7.0):
        tag = "  <- matches bracket ratio 0.250/0.400 = 0.625" if p == RELAXATION_POWER else ""
        print(f"  p = {p:g}: c = {c_of_p(p):.4f}{tag}")
    print()

    sigma0 = 3.0e-16
    rate_const = nbar * sigma0 * vbar

    vgrid = np.geomspace(0.01, 10.0, 100)
    s_inv = sigma0 * vbar          # sigma(vbar) = sigma0
    curve = CrossSectionCurve(
        v=vgrid,
        sigma=s_inv / vgrid,
        sigma_per_l=np.empty((0, vgrid.size)),
        l_values=(),
        isotope_label="1/v reference",
    )
    rate_inv = nbar * s_inv

    cases = (
        ("constant sigma", BRACKET_CONST, rate_const, {"sigma0": sigma0}),
        ("sigma ~ 1/v   ", BRACKET_INV_V, rate_inv, {"curve": curve}),
    )
    rows = []
    for label, bracket, rate, kw in cases:
        gamma_nom = bracket * rate
        per_window: dict[float, list[float]] = {w: [] for w in WINDOWS}
        for seed in range(1, args.seeds + 1):
            cfg = SimConfig(
                n_test=args.n_test, weight=weight, isotope=iso, trap=trap,
                seed=seed, **kw,
            )
            trace = run(cfg, state, args.efolds / gamma_nom)
            for w, (g, _) in windowed_fit(trace, a_eq, gamma_nom).items():
                per_window[w].append(g / rate)
        print(f"{label}  (bracket c = {bracket:.3f}):")
        for w in WINDOWS:
            vals = per_window[w]
            if not vals:
                continue
            mean = float(np.mean(vals))
            err = float(np.std(vals) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            print(f"  {w:4.1f} e-folds: c = {mean:.4f} +- {err:.4f}")
            rows.append((label.strip(), w, mean, err))
        print()

    print("adopted kernel: p = %g, rate factor 1/%g" % (
        RELAXATION_POWER, RETHERMALIZATION_COLLISIONS))
    print("  predicted c: constant sigma %.4f, 1/v %.4f" % (
        1.0 / RETHERMALIZATION_COLLISIONS,
        c_of_p(RELAXATION_POWER) / RETHERMALIZATION_COLLISIONS,
    ))
    print("  initial slope pins c at the bracket (1/2.5); deep fits drift to")
    print("  about 1/3.0; the measured rethermalization number 2.7 lies between.")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "kernel_calibration.csv", "w") as fh:
            fh.write("case,efolds,c_fit,c_err\n")
            for label, w, mean, err in rows:
                fh.write(f"{label},{w},{mean:.6f},{err:.6f}\n")


if __name__ == "__main__":
    main()
