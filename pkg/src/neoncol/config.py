"""Pipeline configuration: INI sections per processing stage.

Key names carry their units as suffixes (t_x_uK, beta_cm3_per_s), so a
config file documents itself and unit mistakes show up in diffs rather
than in outputs.  Paths referenced by a section are checked at load
time; a missing input fails validation, not the pipeline stage.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import BOHR_RADIUS
from .core import IsotopeParams, TrapConfig, default_trap, neon_isotope
from .thermal import AverageKernel, RELAXATION_POWER, RETHERMALIZATION_COLLISIONS

_CM3_TO_M3: float = 1.0e-6


class ConfigError(ValueError):
    """Invalid configuration; message is prefixed with section.key."""

    def __init__(self, section: str, key: str, message: str):
        super().__init__(f"{section}.{key}: {message}")
        self.section = section
        self.key = key


@dataclass(frozen=True)
class SigmaRelSettings:
    a_bohr: tuple[float, ...] = (-180.0, 22.0)
    t_min_uk: float = 100.0
    t_max_uk: float = 800.0
    t_points: int = 29

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_min_uk * 1e-6, self.t_max_uk * 1e-6, self.t_points)


@dataclass(frozen=True)
class AFitSettings:
    a_min_bohr: float = 5.0
    a_max_bohr: float = 7000.0
    per_sign: int = 28
    data_csv: str | None = None

    @property
    def grid(self) -> np.ndarray:
        mags = np.geomspace(self.a_min_bohr, self.a_max_bohr, self.per_sign)
        return np.concatenate([-mags[::-1], mags]) * BOHR_RADIUS


@dataclass(frozen=True)
class DsmcSettings:
    n_test: int = 20000
    atom_number: float = 2.0e8
    t_x_uk: float = 650.0
    t_r_uk: float = 500.0
    duration_s: float = 1.0
    sigma0_m2: float | None = 3.0e-16
    a_bohr: float | None = None
    beta_cm3_per_s: float = 0.0
    sample_rows: int = 400
    dt_s: float | None = None
    density_factors: tuple[float, ...] = ()
    seed: int | None = None


@dataclass(frozen=True)
class PipelineConfig:
    isotope: IsotopeParams
    trap: TrapConfig
    kernel: AverageKernel
    seed: int = 1
    sigma_rel: SigmaRelSettings = field(default_factory=SigmaRelSettings)
    fit_a: AFitSettings = field(default_factory=AFitSettings)
    dsmc: DsmcSettings = field(default_factory=DsmcSettings)
    decay_csv: str | None = None
    heating_csv: str | None = None
    gamma_csv: str | None = None
    table1_csv: dict = field(default_factory=dict)


def default_config() -> PipelineConfig:
    return PipelineConfig(
        isotope=neon_isotope(20),
        trap=default_trap(),
        kernel=AverageKernel(
            p=RELAXATION_POWER, rate_factor=1.0 / RETHERMALIZATION_COLLISIONS
        ),
    )


def _get(parser, section, key, conv, default, errors):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError):
        errors.append(ConfigError(section, key, f"cannot parse {raw!r}"))
        return default


def _float_list(raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _existing_path(base: Path, raw: str) -> str:
    p = Path(raw)
    if not p.is_absolute():
        p = base / p
    if not p.is_file():
        raise FileNotFoundError(str(p))
    return str(p)


def load_config(path) -> PipelineConfig:
    """Parse and validate an INI config; raises ConfigError on the first
    invalid field (missing referenced files included)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("run", "config", f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as err:
        raise ConfigError("run", "config", f"malformed INI: {err}") from err

    errors: list[ConfigError] = []
    base = path.parent

    mass = _get(parser, "run", "isotope", int, 20, errors)
    c6 = _get(parser, "run", "c6_au", float, 2100.0, errors)
    seed = _get(parser, "run", "seed", int, 1, errors)
    try:
        isotope = neon_isotope(mass, c6_au=c6)
    except ValueError as err:
        raise ConfigError("run", "isotope", str(err)) from err

    power = _get(parser, "kernel", "power", float, RELAXATION_POWER, errors)
    colls = _get(
        parser,
        "kernel",
        "rethermalization_collisions",
        float,
        RETHERMALIZATION_COLLISIONS,
        errors,
    )
    if colls <= 0.0:
        raise ConfigError("kernel", "rethermalization_collisions", "must be positive")
    try:
        kernel = AverageKernel(p=power, rate_factor=1.0 / colls)
    except ValueError as err:
        raise ConfigError("kernel", "power", str(err)) from err

    sig = SigmaRelSettings(
        a_bohr=_get(parser, "sigma_rel", "a_bohr", _float_list, (-180.0, 22.0), errors),
        t_min_uk=_get(parser, "sigma_rel", "t_min_uK", float, 100.0, errors),
        t_max_uk=_get(parser, "sigma_rel", "t_max_uK", float, 800.0, errors),
        t_points=_get(parser, "sigma_rel", "t_points", int, 29, errors),
    )
    if sig.t_min_uk <= 0.0 or sig.t_max_uk <= sig.t_min_uk:
        raise ConfigError("sigma_rel", "t_min_uK", "need 0 < t_min_uK < t_max_uK")
    if sig.t_points < 2:
        raise ConfigError("sigma_rel", "t_points", "need at least 2 grid points")

    def path_or_none(section, key):
        if not parser.has_option(section, key):
            return None
        raw = parser.get(section, key)
        try:
            return _existing_path(base, raw)
        except FileNotFoundError as err:
            errors.append(ConfigError(section, key, f"file not found: {err}"))
            return None

    afit = AFitSettings(
        a_min_bohr=_get(parser, "fit_a", "a_min_bohr", float, 5.0, errors),
        a_max_bohr=_get(parser, "fit_a", "a_max_bohr", float, 7000.0, errors),
        per_sign=_get(parser, "fit_a", "per_sign", int, 28, errors),
        data_csv=path_or_none("fit_a", "data_csv"),
    )
    if afit.a_min_bohr <= 0.0 or afit.a_max_bohr <= afit.a_min_bohr:
        raise ConfigError("fit_a", "a_min_bohr", "need 0 < a_min_bohr < a_max_bohr")
    if afit.per_sign < 3:
        raise ConfigError("fit_a", "per_sign", "need at least 3 candidates per sign")

    sigma0 = _get(parser, "dsmc", "sigma0_m2", float, None, errors)
    a_dsmc = _get(parser, "dsmc", "a_bohr", float, None, errors)
    if sigma0 is None and a_dsmc is None:
        sigma0 = 3.0e-16
    if sigma0 is not None and a_dsmc is not None:
        raise ConfigError("dsmc", "sigma0_m2", "give either sigma0_m2 or a_bohr, not both")
    dsmc = DsmcSettings(
        n_test=_get(parser, "dsmc", "n_test", int, 20000, errors),
        atom_number=_get(parser, "dsmc", "atom_number", float, 2.0e8, errors),
        t_x_uk=_get(parser, "dsmc", "t_x_uK", float, 650.0, errors),
        t_r_uk=_get(parser, "dsmc", "t_r_uK", float, 500.0, errors),
        duration_s=_get(parser, "dsmc", "duration_s", float, 1.0, errors),
        sigma0_m2=sigma0,
        a_bohr=a_dsmc,
        beta_cm3_per_s=_get(parser, "dsmc", "beta_cm3_per_s", float, 0.0, errors),
        sample_rows=_get(parser, "dsmc", "sample_rows", int, 400, errors),
        dt_s=_get(parser, "dsmc", "dt_s", float, None, errors),
        density_factors=_get(parser, "dsmc", "density_factors", _float_list, (), errors),
        seed=_get(parser, "dsmc", "seed", int, None, errors),
    )
    for key, val in (
        ("n_test", dsmc.n_test),
        ("atom_number", dsmc.atom_number),
        ("t_x_uK", dsmc.t_x_uk),
        ("t_r_uK", dsmc.t_r_uk),
        ("duration_s", dsmc.duration_s),
    ):
        if val <= 0:
            raise ConfigError("dsmc", key, "must be positive")
    if dsmc.beta_cm3_per_s < 0.0:
        raise ConfigError("dsmc", "beta_cm3_per_s", "must be nonnegative")
    if any(f <= 0.0 for f in dsmc.density_factors):
        raise ConfigError("dsmc", "density_factors", "factors must be positive")

    table1 = {}
    for key in ("ne20_csv", "ne22_csv"):
        found = path_or_none("table1", key)
        if found is not None:
            table1[key[:4]] = found

    cfg = PipelineConfig(
        isotope=isotope,
        trap=default_trap(),
        kernel=kernel,
        seed=seed,
        sigma_rel=sig,
        fit_a=afit,
        dsmc=dsmc,
        decay_csv=path_or_none("fit_decay", "data_csv"),
        heating_csv=path_or_none("fit_heating", "data_csv"),
        gamma_csv=path_or_none("fit_gamma", "data_csv"),
        table1_csv=table1,
    )
    if errors:
        raise errors[0]
    return cfg


def beta_si(settings: DsmcSettings) -> float:
    """Two-body loss coefficient in m^3/s."""
    return settings.beta_cm3_per_s * _CM3_TO_M3
