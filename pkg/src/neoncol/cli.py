"""Command-line pipeline around the library.

Subcommands mirror the analysis stages: relaxation-curve generation,
the three fitters, the chi-square scattering-length scan, the particle
simulation, and the summary table.  Each command writes delimited
artifacts plus a rendered figure into --out; with fixed seeds a rerun
reproduces every data file byte for byte.

Exit codes: 0 success, 2 configuration, 3 input data, 4 computation.
Errors print one line, "error: <category>: <message>".
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import plots
from .config import ConfigError, PipelineConfig, beta_si, default_config, load_config
from .constants import BOHR_RADIUS
from .core import (
    CsvFormatError,
    ThermalState,
    aspect_ratio,
    load_measurement_series,
    mean_density,
)
from .dsmc import SimConfig, SimConfigError, measure_gamma_rel, run
from .dynamics import linearized_observables, rescale_time
from .inference import (
    FitResult,
    SigmaRelDatum,
    fit_decay,
    fit_gamma_rel,
    fit_heating_beta,
    fit_scattering_length,
    propagate_ratio,
)
from .potential import TuningError
from .scattering import ConvergenceError
from .thermal import relaxation_curve, tuned_cross_section, unitarity_limit_curve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_COMPUTE = 4


def format_pm(value: float, sigma: float, sigma_plus: float | None = None) -> str:
    """Compact value(uncertainty) notation as used in the summary table.

    The uncertainty is displayed with one significant digit (two when it
    leads with a 1) and the value is rounded to the same decimal place.
    The displayed uncertainty is the relative uncertainty applied to the
    *rounded* value, which is how the reference numbers were typeset.
    Asymmetric errors render as value(+up/-down).
    """
    if sigma_plus is not None and sigma_plus != sigma:
        ref = max(sigma, sigma_plus)
        e = math.floor(math.log10(ref))
        scale = 10.0**e
        vr = round(value / scale) * scale
        up = round(sigma_plus / scale) * scale
        dn = round(sigma / scale) * scale
        return f"{vr:+g}({up:+g}/-{dn:g})"
    if sigma <= 0.0 or value == 0.0:
        return f"{value:g}"
    e = math.floor(math.log10(sigma))
    lead = int(sigma / 10.0**e)
    digits = 2 if lead == 1 else 1
    scale = 10.0 ** (e - (digits - 1))
    vr = round(value / scale) * scale
    rel = sigma / abs(value)
    sr = round(abs(vr) * rel / scale)
    if e - (digits - 1) >= 0:
        return f"{vr:.0f}({sr * scale:.0f})"
    return f"{vr:.{-(e - (digits - 1))}f}({sr:d})"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in row])


def _write_fit(fit: FitResult, stem: Path) -> None:
    header: list[str] = []
    row: list[float] = []
    for name, value, sigma in zip(fit.names, fit.values, fit.sigmas):
        header += [name, f"sigma_{name}"]
        row += [value, sigma]
    header += ["chi2", "dof"]
    row += [fit.chi2, float(fit.dof)]
    _write_csv(stem.with_suffix(".csv"), header, [row])
    stem.with_suffix(".txt").write_text(fit.report() + "\n")


def _load_sigma_rel_data(path) -> tuple[SigmaRelDatum, ...]:
    """CSV columns: T_uK, sigma_rel_m2, unc_m2."""
    expected = ["T_uK", "sigma_rel_m2", "unc_m2"]
    data = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CsvFormatError(1, "empty file") from None
        if header != expected:
            raise CsvFormatError(1, f"expected columns {expected}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t_uk, sig, unc = (float(c) for c in row[:3])
            except ValueError:
                raise CsvFormatError(lineno, f"bad row {row!r}") from None
            try:
                data.append(
                    SigmaRelDatum(
                        t_mean=t_uk * 1e-6, sigma_rel=sig, sigma_uncertainty=unc
                    )
                )
            except ValueError as exc:
                raise CsvFormatError(lineno, str(exc)) from None
    if not data:
        raise CsvFormatError(2, "no data rows")
    return tuple(data)


def _require(value, section: str, key: str):
    if value is None:
        raise ConfigError(section, key, "required by this command but not set")
    return value


def cmd_sigma_rel(cfg: PipelineConfig, out: Path) -> None:
    t_grid = cfg.sigma_rel.t_grid
    curves = [
        relaxation_curve(a * BOHR_RADIUS, cfg.isotope, kernel=cfg.kernel, t_grid=t_grid)
        for a in cfg.sigma_rel.a_bohr
    ]
    unit = unitarity_limit_curve(cfg.isotope, t_grid=t_grid, kernel=cfg.kernel)
    header = ["T_K"]
    cols = [t_grid]
    for a, curve in zip(cfg.sigma_rel.a_bohr, curves):
        header.append(f"sigma_rel_a{a:+g}a0_m2")
        cols.append(curve.sigma_rel)
    header.append("sigma_rel_unitarity_m2")
    cols.append(unit.sigma_rel)
    _write_csv(out / "sigma_rel.csv", header, zip(*cols))
    plots.plot_relaxation_curves(curves + [unit], out / "sigma_rel.png")


def cmd_fit_decay(cfg: PipelineConfig, out: Path) -> None:
    series = load_measurement_series(
        _require(cfg.decay_csv, "fit_decay", "data_csv"), cfg.trap, cfg.isotope
    )
    fit = fit_decay(series)
    x, y = linearized_observables(series)
    _write_csv(
        out / "decay_points.csv",
        ["nbar_avg_m3", "log_slope_per_s"],
        zip(x.tolist(), y.tolist()),
    )
    _write_fit(fit, out / "decay_fit")
    plots.plot_decay_line(x, y, fit, out / "decay_fit.png")


def cmd_fit_heating(cfg: PipelineConfig, out: Path) -> None:
    series = load_measurement_series(
        _require(cfg.heating_csv, "fit_heating", "data_csv"), cfg.trap, cfg.isotope
    )
    fit = fit_heating_beta(series)
    _write_fit(fit, out / "heating_fit")
    t = series.times()
    tm = [(r.t_x + 2.0 * r.t_r) / 3.0 for r in series.records]
    plots.plot_heating(t, tm, out / "heating_fit.png")


def cmd_fit_gamma(cfg: PipelineConfig, out: Path) -> None:
    series = load_measurement_series(
        _require(cfg.gamma_csv, "fit_gamma", "data_csv"), cfg.trap, cfg.isotope
    )
    fit = fit_gamma_rel(series)
    _write_fit(fit, out / "gamma_fit")
    t_star = rescale_time(series)
    aspect = np.array([aspect_ratio(s) for s in series.states()])
    plots.plot_aspect_fit(t_star, aspect, fit, out / "gamma_fit.png")


def cmd_fit_a(cfg: PipelineConfig, out: Path) -> None:
    data = _load_sigma_rel_data(_require(cfg.fit_a.data_csv, "fit_a", "data_csv"))
    scan = fit_scattering_length(
        data, cfg.isotope, kernel=cfg.kernel, a_grid=cfg.fit_a.grid
    )
    _write_csv(
        out / "chi2_scan.csv",
        ["a_bohr", "chi2"],
        zip((scan.candidates / BOHR_RADIUS).tolist(), scan.chi2.tolist()),
    )
    _write_csv(
        out / "a_minima.csv",
        ["a_bohr", "chi2", "sigma_bohr", "relative_likelihood"],
        [
            (m.a_bohr, m.chi2, m.sigma / BOHR_RADIUS, m.relative_likelihood)
            for m in scan.minima
        ],
    )
    _write_fit(scan.result, out / "a_fit")
    plots.plot_chi2_scan(scan, out / "chi2_scan.png")


def _sim_config(cfg: PipelineConfig, seed_flag: int | None, state: ThermalState) -> SimConfig:
    d = cfg.dsmc
    seed = seed_flag if seed_flag is not None else (
        d.seed if d.seed is not None else cfg.seed
    )
    curve = None
    if d.a_bohr is not None:
        curve = tuned_cross_section(d.a_bohr * BOHR_RADIUS, cfg.isotope)
    return SimConfig(
        n_test=d.n_test,
        weight=state.atom_number / d.n_test,
        isotope=cfg.isotope,
        trap=cfg.trap,
        sigma0=d.sigma0_m2,
        curve=curve,
        beta=beta_si(d),
        dt=d.dt_s,
        sample_rows=d.sample_rows,
        seed=seed,
    )


def cmd_dsmc(cfg: PipelineConfig, out: Path, seed_flag: int | None) -> None:
    d = cfg.dsmc
    base_state = ThermalState(
        atom_number=d.atom_number,
        t_x=d.t_x_uk * 1e-6,
        t_r=d.t_r_uk * 1e-6,
        trap=cfg.trap,
        isotope=cfg.isotope,
    )
    factors = d.density_factors or (1.0,)
    rows = []
    for i, factor in enumerate(factors):
        state = ThermalState(
            atom_number=d.atom_number * factor,
            t_x=base_state.t_x,
            t_r=base_state.t_r,
            trap=cfg.trap,
            isotope=cfg.isotope,
        )
        sim = _sim_config(cfg, seed_flag, state)
        trace = run(sim, state, d.duration_s)
        name = "trace.csv" if len(factors) == 1 else f"trace_f{i}.csv"
        trace.to_csv(out / name)
        # the simulated trap's equilibrium aspect is exact, so pin it;
        # a free A_eq degenerates with gamma on short arcs
        fit = measure_gamma_rel(trace, fix_a_eq=cfg.trap.omega_r / cfg.trap.omega_x)
        rows.append((factor, mean_density(state), fit.gamma_rel, fit.gamma_err))
        if len(factors) == 1:
            (out / "gamma_fit.txt").write_text(
                f"gamma_rel_per_s = {fit.gamma_rel:.6g} +- {fit.gamma_err:.3g}\n"
                f"a_eq = {fit.a_eq:.6g}\na0 = {fit.a0:.6g}\n"
                f"r_squared = {fit.r_squared:.6g}\n"
                f"e_foldings = {fit.e_foldings:.3g}\n"
            )
            plots.plot_trace(trace, out / "trace.png")
    if len(factors) > 1:
        _write_csv(
            out / "gamma_vs_density.csv",
            ["factor", "nbar0_m3", "gamma_rel_per_s", "gamma_err_per_s"],
            rows,
        )
        plots.plot_gamma_vs_density(
            [r[1] for r in rows],
            [r[2] for r in rows],
            [r[3] for r in rows],
            out / "gamma_vs_density.png",
        )


_TABLE1_ROWS = (
    "sigma_rel_200uK_1e-17_m2",
    "sigma_rel_550uK_1e-17_m2",
    "a_a0",
    "beta_1e-12_cm3_per_s",
    "beta_unpol_1e-12_cm3_per_s",
)


def _load_table1_inputs(path) -> dict:
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CsvFormatError(1, "empty file") from None
        expected = ["quantity", "value", "sigma_minus", "sigma_plus"]
        if header != expected:
            raise CsvFormatError(1, f"expected columns {expected}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows[row[0].strip()] = tuple(float(c) for c in row[1:4])
            except ValueError:
                raise CsvFormatError(lineno, f"bad row {row!r}") from None
    missing = [q for q in _TABLE1_ROWS if q not in rows]
    if missing:
        raise CsvFormatError(2, f"missing quantities {missing}")
    return rows


def cmd_table1(cfg: PipelineConfig, out: Path) -> None:
    if not cfg.table1_csv:
        raise ConfigError("table1", "ne20_csv", "no input files configured")
    columns = {}
    for label, path in sorted(cfg.table1_csv.items()):
        columns[label] = _load_table1_inputs(path)
    for label, rows in columns.items():
        b, bm, bp = rows["beta_1e-12_cm3_per_s"]
        u, um, up = rows["beta_unpol_1e-12_cm3_per_s"]
        r, sr = propagate_ratio(u, max(um, up), b, max(bm, bp))
        rows["ratio_unpol_over_pol"] = (r, sr, sr)

    all_rows = _TABLE1_ROWS + ("ratio_unpol_over_pol",)
    labels = sorted(columns)
    header = ["quantity"]
    for label in labels:
        header += [f"{label}_value", f"{label}_sigma_minus", f"{label}_sigma_plus"]
    csv_rows = []
    for q in all_rows:
        row: list = [q]
        for label in labels:
            row += list(columns[label][q])
        csv_rows.append(row)
    _write_csv(out / "table1.csv", header, csv_rows)

    width = max(len(q) for q in all_rows) + 2
    lines = ["".join([" " * width] + [f"{lb:>18}" for lb in labels])]
    for q in all_rows:
        cells = [f"{q:<{width}}"]
        for label in labels:
            v, sm, sp = columns[label][q]
            cells.append(f"{format_pm(v, sm, sp if sp != sm else None):>18}")
        lines.append("".join(cells))
    (out / "table1.txt").write_text("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="neoncol",
        description="Cold metastable-neon collision analysis pipeline",
    )
    parser.add_argument("--config", metavar="PATH", help="INI configuration file")
    parser.add_argument(
        "--out", metavar="DIR", default=".", help="output directory (created if absent)"
    )
    parser.add_argument(
        "--seed", metavar="N", type=int, default=None, help="override simulation seed"
    )
    parser.add_argument(
        "command",
        choices=(
            "sigma-rel",
            "fit-decay",
            "fit-heating",
            "fit-gamma",
            "fit-a",
            "dsmc",
            "table1",
        ),
    )
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else default_config()
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "sigma-rel":
            cmd_sigma_rel(cfg, out)
        elif args.command == "fit-decay":
            cmd_fit_decay(cfg, out)
        elif args.command == "fit-heating":
            cmd_fit_heating(cfg, out)
        elif args.command == "fit-gamma":
            cmd_fit_gamma(cfg, out)
        elif args.command == "fit-a":
            cmd_fit_a(cfg, out)
        elif args.command == "dsmc":
            cmd_dsmc(cfg, out, args.seed)
        else:
            cmd_table1(cfg, out)
    except ConfigError as err:
        print(f"error: config: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (CsvFormatError, FileNotFoundError) as err:
        print(f"error: data: {err}", file=sys.stderr)
        return EXIT_DATA
    except (
        TuningError,
        ConvergenceError,
        SimConfigError,
        ValueError,
        RuntimeError,
    ) as err:
        print(f"error: compute: {err}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
