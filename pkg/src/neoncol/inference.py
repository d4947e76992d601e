"""Parameter estimation: loss coefficients, heating, relaxation rate,
scattering length, and the uncertainty bookkeeping they share.

Every fitter returns a FitResult.  Linear problems (decay line, heating
slope, expansion thermometry) go through weighted least squares on a
standardized design matrix; the relaxation rate uses bounded nonlinear
least squares; the scattering length is a chi-square scan over an
explicit grid of candidates in both signs, because the objective is
multimodal and a local optimizer would silently pick a sign.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar

from .core import IsotopeParams, MeasurementSeries, aspect_ratio, mean_density, mean_temperature
from .constants import BOHR_RADIUS, K_B
from .dynamics import linearized_observables, rescale_time, running_integral
from .potential import DEFAULT_BRANCH, TuningError
from .scattering import DEFAULT_L_MAX, ConvergenceError
from .thermal import AverageKernel, relaxation_kernel, thermal_average, tuned_cross_section

_MIN_RELATIVE_SIGMA: float = 1.0e-12
_GAMMA_FIT_RESTARTS: int = 4
_DELTA_CHI2: float = 1.0


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with 1-sigma uncertainties and fit quality.

    ``notes`` carries flags such as "degenerate" or "no two-body signal"
    that qualify the numbers without invalidating the structure.
    """

    names: tuple[str, ...]
    values: tuple[float, ...]
    sigmas: tuple[float, ...]
    covariance: np.ndarray
    chi2: float
    dof: int
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.names)
        if not (len(self.values) == len(self.sigmas) == n):
            raise ValueError("names, values and sigmas must align")
        if any(s < 0.0 for s in self.sigmas if not math.isnan(s)):
            raise ValueError("uncertainties must be nonnegative")
        if self.chi2 < 0.0:
            raise ValueError("chi2 must be nonnegative")

    def __getitem__(self, name: str) -> tuple[float, float]:
        i = self.names.index(name)
        return self.values[i], self.sigmas[i]

    def report(self) -> str:
        lines = [
            f"{n} = {v:.6g} +- {s:.3g}"
            for n, v, s in zip(self.names, self.values, self.sigmas)
        ]
        lines.append(f"chi2/dof = {self.chi2:.4g}/{self.dof}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def _weighted_line(x: np.ndarray, y: np.ndarray, sigma_y: np.ndarray):
    """Weighted LSQ of y = c0 + c1 x on a standardized design.

    The raw abscissa can span ~1e16 (mean densities), which makes the
    normal equations of [1, x] numerically singular; centering and
    scaling x first keeps the solve well conditioned at any magnitude.
    """
    w = 1.0 / sigma_y
    x0 = np.average(x, weights=w**2)
    sx = np.sqrt(np.average((x - x0) ** 2, weights=w**2))
    if sx == 0.0:
        raise ValueError("abscissa has no spread")
    u = (x - x0) / sx
    a_mat = np.column_stack([w, w * u])
    b = w * y
    coef, *_ = np.linalg.lstsq(a_mat, b, rcond=None)
    cov_u = np.linalg.inv(a_mat.T @ a_mat)
    # undo the standardization: slope = c1/sx, intercept = c0 - c1 x0/sx
    jac = np.array([[1.0, -x0 / sx], [0.0, 1.0 / sx]])
    cov = jac @ cov_u @ jac.T
    intercept = coef[0] - coef[1] * x0 / sx
    slope = coef[1] / sx
    resid = b - a_mat @ coef
    chi2 = float(resid @ resid)
    return intercept, slope, cov, chi2


def _density_rel_sigma(series: MeasurementSeries) -> np.ndarray:
    """Relative 1-sigma of nbar per record; nbar ~ N / (sqrt(Tx) Tr)."""
    out = np.empty(len(series.records))
    for i, r in enumerate(series.records):
        out[i] = math.sqrt(
            (r.sigma_n / r.atom_number) ** 2
            + (0.5 * r.sigma_tx / r.t_x) ** 2
            + (r.sigma_tr / r.t_r) ** 2
        )
    return out


def _integral_weights(t: np.ndarray) -> np.ndarray:
    """Running-trapezoid weight matrix: row i maps samples to I(t_i)."""
    n = t.size
    weights = np.zeros((n, n))
    for i in range(1, n):
        dt = t[i] - t[i - 1]
        weights[i:, i - 1] += 0.5 * dt
        weights[i:, i] += 0.5 * dt
    return weights


def _integral_sigma(t: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """1-sigma of the running trapezoid integral of noisy samples."""
    weights = _integral_weights(t)
    return np.sqrt((weights**2) @ sigma**2)


def _gls_line(x: np.ndarray, y: np.ndarray, cov_y: np.ndarray):
    """Generalized LSQ of y = c0 + c1 x under a full noise covariance.

    The design is centered and scaled first: the raw abscissa can span
    ~1e16 (mean densities), which makes the normal equations of [1, x]
    numerically singular otherwise.  Besides the fit itself the return
    carries the influence matrix (d(intercept, slope)/dy) and the
    inverse-covariance-weighted residual, both in original coordinates;
    error propagation through a noisy abscissa needs them.
    """
    x0 = float(np.mean(x))
    sx = float(np.std(x))
    if sx == 0.0:
        raise ValueError("abscissa has no spread")
    u = (x - x0) / sx
    chol = np.linalg.cholesky(cov_y)
    a_w = np.linalg.solve(chol, np.column_stack([np.ones_like(u), u]))
    y_w = np.linalg.solve(chol, y)
    coef, *_ = np.linalg.lstsq(a_w, y_w, rcond=None)
    cov_u = np.linalg.inv(a_w.T @ a_w)
    jac = np.array([[1.0, -x0 / sx], [0.0, 1.0 / sx]])
    cov = jac @ cov_u @ jac.T
    intercept = coef[0] - coef[1] * x0 / sx
    slope = coef[1] / sx
    resid = y_w - a_w @ coef
    chi2 = float(resid @ resid)
    influence = jac @ (cov_u @ a_w.T @ np.linalg.inv(chol))
    pull = np.linalg.solve(chol.T, resid)
    return intercept, slope, cov, chi2, influence, pull


def fit_decay(series: MeasurementSeries) -> FitResult:
    """One- and two-body loss coefficients from a decay series.

    The series is mapped to the straight line y = -alpha - beta x with
    y = log(N/N0)/t and x the running time-averaged density.  The noise
    structure is dense: every y carries the same N0 fluctuation scaled
    by 1/t, the x values integrate the measured density, and the same
    atom-number draws enter both axes.  The fit weights with the
    (diagonal + rank-one) ordinate covariance, then reports
    uncertainties by first-order propagation of each record's N, Tx and
    Tr noise through both axes at once; diagonal weighting alone
    understates the beta uncertainty by nearly a factor 2.  A negative
    fitted beta is reported via a note, never clamped.
    """
    x, y = linearized_observables(series)
    recs = series.records
    n = np.array([r.atom_number for r in recs])
    sig_n = np.array([r.sigma_n for r in recs])
    t = series.times()
    t_rel = t[1:] - t[0]
    rel = np.maximum(sig_n / n, _MIN_RELATIVE_SIGMA)
    inv_t = 1.0 / t_rel
    cov_y = np.diag((rel[1:] * inv_t) ** 2) + rel[0] ** 2 * np.outer(inv_t, inv_t)

    states = series.states()
    nbar = np.array([mean_density(s) for s in states])
    sigma_x = _integral_sigma(t, nbar * _density_rel_sigma(series))[1:] / t_rel

    intercept, slope, cov, chi2, infl, pull = _gls_line(x, y, cov_y)
    for _ in range(2):
        cov_eff = cov_y + np.diag((slope * sigma_x) ** 2)
        intercept, slope, cov, chi2, infl, pull = _gls_line(x, y, cov_eff)

    # propagate per-record relative noises through both axes; d(theta)/dx
    # combines the residual term of the normal equations with the usual
    # -slope * influence errors-in-variables term
    npts = t.size
    d_theta_dx = np.outer(cov @ np.array([0.0, 1.0]), pull) - slope * infl
    x_sens = _integral_weights(t)[1:] * nbar[None, :] / t_rel[:, None]
    dy_dn = np.zeros((npts - 1, npts))
    dy_dn[:, 0] = -inv_t
    dy_dn[np.arange(npts - 1), np.arange(1, npts)] += inv_t
    jac_n = infl @ dy_dn + d_theta_dx @ x_sens
    jac_tx = d_theta_dx @ (-0.5 * x_sens)
    jac_tr = d_theta_dx @ (-x_sens)
    tx_rel = np.array([r.sigma_tx / r.t_x for r in recs])
    tr_rel = np.array([r.sigma_tr / r.t_r for r in recs])
    cov = (
        (jac_n * rel**2) @ jac_n.T
        + (jac_tx * tx_rel**2) @ jac_tx.T
        + (jac_tr * tr_rel**2) @ jac_tr.T
    )

    alpha, beta = -intercept, -slope
    # the (alpha, beta) jacobian is -I, which leaves the covariance as is
    sig_alpha, sig_beta = np.sqrt(np.diag(cov))
    notes = ()
    if beta < 0.0:
        notes = ("no two-body signal",)
    return FitResult(
        names=("alpha_per_s", "beta_m3_per_s"),
        values=(float(alpha), float(beta)),
        sigmas=(float(sig_alpha), float(sig_beta)),
        covariance=cov,
        chi2=chi2,
        dof=len(x) - 2,
        notes=notes,
    )


def fit_heating_beta(series: MeasurementSeries) -> FitResult:
    """Two-body coefficient from the intrinsic heating of a decaying cloud.

    Integrating dT/dt = (beta/4) nbar T gives log(T/T0) = (beta/4) * I(t)
    with I the time integral of nbar.  Although the model line passes
    through the origin, the measured T0 does not: its noise shifts every
    point by the same amount, so the fit carries a free intercept that
    absorbs the common mode (forcing the origin halves the coverage of
    the reported uncertainty).  Cooling series are rejected.
    """
    recs = series.records
    if len(recs) < 3:
        raise ValueError("need at least 3 records")
    states = series.states()
    t = series.times()
    tm = np.array([mean_temperature(s) for s in states])
    if tm[-1] < tm[0]:
        raise ValueError("series is cooling; cannot fit a heating rate")
    nbar = np.array([mean_density(s) for s in states])
    integral = running_integral(t, nbar)

    y = np.log(tm[1:] / tm[0])
    x = integral[1:]
    sig_tm = np.array(
        [math.sqrt(r.sigma_tx**2 + 4.0 * r.sigma_tr**2) / 3.0 for r in recs]
    )
    sigma_y = np.maximum(sig_tm[1:] / tm[1:], _MIN_RELATIVE_SIGMA)
    sigma_x = _integral_sigma(t, nbar * _density_rel_sigma(series))[1:]

    intercept, slope, cov, chi2 = _weighted_line(x, y, sigma_y)
    for _ in range(2):
        sigma_eff = np.sqrt(sigma_y**2 + (slope * sigma_x) ** 2)
        intercept, slope, cov, chi2 = _weighted_line(x, y, sigma_eff)
    beta = 4.0 * slope
    return FitResult(
        names=("beta_heat_m3_per_s",),
        values=(float(beta),),
        sigmas=(float(4.0 * math.sqrt(cov[1, 1])),),
        covariance=np.array([[16.0 * cov[1, 1]]]),
        chi2=chi2,
        dof=len(x) - 2,
    )


def fit_gamma_rel(series: MeasurementSeries) -> FitResult:
    """Relaxation rate of the aspect ratio in collision-rescaled time.

    Fits A(t*) = A_eq + (A0 - A_eq) exp(-gamma t*) and also emits the
    effective temperature of the relaxation: the average of T_mean(t)
    weighted by the fitted |dA/dt|, which concentrates on the early,
    fast-changing part of the series.
    """
    recs = series.records
    if len(recs) < 5:
        raise ValueError("need at least 5 records")
    states = series.states()
    t_star = rescale_time(series)
    a = np.array([aspect_ratio(s) for s in states])
    tm = np.array([mean_temperature(s) for s in states])
    sig_a = np.array(
        [
            0.5
            * aspect_ratio(s)
            * math.sqrt((r.sigma_tx / r.t_x) ** 2 + (r.sigma_tr / r.t_r) ** 2)
            for r, s in zip(recs, states)
        ]
    )
    have_weights = np.all(sig_a > 0.0)
    sig_fit = sig_a if have_weights else None

    def model(tt, gamma, a_eq, a0):
        return a_eq + (a0 - a_eq) * np.exp(-gamma * tt)

    span = t_star[-1] - t_star[0]
    amid = 0.5 * (a[0] + a[-1])
    p0_list = [
        (2.0 / span, a[-1], a[0]),
        (0.5 / span, a[-1], a[0]),
        (8.0 / span, amid, a[0]),
        (2.0 / span, amid, 2.0 * a[0] - amid),
    ]
    last_err: Exception | None = None
    for p0 in p0_list[: _GAMMA_FIT_RESTARTS]:
        try:
            popt, pcov = curve_fit(
                model, t_star, a, p0=p0, sigma=sig_fit, absolute_sigma=have_weights
            )
            break
        except RuntimeError as err:
            last_err = err
    else:
        resid = float(np.sum((a - model(t_star, *p0_list[0])) ** 2))
        raise RuntimeError(
            f"relaxation fit did not converge (residual {resid:.3g}): {last_err}"
        )

    gamma, a_eq, a0 = popt
    sig = np.sqrt(np.diag(pcov))
    resid = (a - model(t_star, *popt)) / (sig_a if have_weights else 1.0)
    chi2 = float(resid @ resid)

    # dA/dt* weight for the effective temperature; normalization cancels
    wgt = np.exp(-gamma * t_star)
    t_eff = float(np.sum(wgt * tm) / np.sum(wgt))
    t_eff_sig = float(
        math.sqrt(np.sum(wgt * (tm - t_eff) ** 2) / np.sum(wgt))
    )

    notes = []
    spread = float(np.max(np.abs(a - np.mean(a))))
    noise = float(np.median(sig_a)) if have_weights else 0.0
    if abs(a0 - a_eq) <= 2.0 * noise or spread <= 2.0 * noise:
        notes.append("degenerate: series already equilibrated, gamma unconstrained")
    if gamma * span < 2.0:
        notes.append("under-relaxed: fewer than 2 e-foldings observed")

    cov = np.zeros((4, 4))
    cov[:3, :3] = pcov
    cov[3, 3] = t_eff_sig**2
    return FitResult(
        names=("gamma_rel_per_s", "a_eq", "a0", "t_eff_K"),
        values=(float(gamma), float(a_eq), float(a0), t_eff),
        sigmas=(float(sig[0]), float(sig[1]), float(sig[2]), t_eff_sig),
        covariance=cov,
        chi2=chi2,
        dof=len(recs) - 3,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class SigmaRelDatum:
    """One measured relaxation cross section at a mean temperature."""

    t_mean: float             # K
    sigma_rel: float          # m^2
    sigma_uncertainty: float  # m^2, statistical and systematic in quadrature

    def __post_init__(self) -> None:
        if self.t_mean <= 0.0 or self.sigma_rel <= 0.0 or self.sigma_uncertainty <= 0.0:
            raise ValueError("datum fields must be positive")


@dataclass(frozen=True)
class ChiSquareMinimum:
    """One local minimum of the chi-square scan."""

    a: float                  # m
    chi2: float
    sigma: float              # m, from delta-chi2 = 1
    relative_likelihood: float

    @property
    def a_bohr(self) -> float:
        return self.a / BOHR_RADIUS


@dataclass(frozen=True)
class ScatteringLengthFit:
    """Chi-square scan over scattering-length candidates.

    ``minima`` is ordered by chi2; ``result`` summarizes the global one.
    """

    candidates: np.ndarray    # m, as evaluated (sorted)
    chi2: np.ndarray
    minima: tuple[ChiSquareMinimum, ...]
    result: FitResult
    failed: tuple[float, ...] = field(default=())


def default_a_grid(
    lo_bohr: float = 5.0, hi_bohr: float = 7000.0, per_sign: int = 28
) -> np.ndarray:
    """Log-spaced candidates in both signs, in meters."""
    mags = np.geomspace(lo_bohr, hi_bohr, per_sign) * BOHR_RADIUS
    return np.concatenate([-mags[::-1], mags])


def _chi2_of(
    a: float,
    data: tuple[SigmaRelDatum, ...],
    isotope: IsotopeParams,
    kernel: AverageKernel,
    branch: int,
    l_max: int,
) -> float:
    curve = tuned_cross_section(a, isotope, branch=branch, l_max=l_max)
    total = 0.0
    for d in data:
        model = thermal_average(curve, isotope, d.t_mean, kernel)
        total += ((d.sigma_rel - model) / d.sigma_uncertainty) ** 2
    return total


def fit_scattering_length(
    data,
    isotope: IsotopeParams,
    kernel: AverageKernel | None = None,
    a_grid=None,
    branch: int = DEFAULT_BRANCH,
    l_max: int = DEFAULT_L_MAX,
    workers: int = 1,
) -> ScatteringLengthFit:
    """Chi-square scan of sigma_rel data over scattering-length candidates.

    The objective is multimodal (the sign of a is a physical ambiguity),
    so every interior local minimum of the scan is refined by bounded
    1-d minimization and reported with its delta-chi2 = 1 half width and
    likelihood relative to the global minimum.  Candidates whose tuning
    or phase-shift integration fails (resonance poles) are dropped; if
    none survive, the grid itself is rejected.
    """
    data = tuple(sorted(data, key=lambda d: d.t_mean))
    if len(data) < 2:
        raise ValueError("need at least 2 data points")
    kernel = relaxation_kernel() if kernel is None else kernel
    grid = default_a_grid() if a_grid is None else np.sort(np.asarray(a_grid, float))
    if grid.size < 3:
        raise ValueError("a-grid needs at least 3 candidates")

    args = (data, isotope, kernel, branch, l_max)
    chi2 = np.full(grid.size, np.nan)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_chi2_of, float(a), *args) for a in grid]
            for i, fut in enumerate(futs):
                try:
                    chi2[i] = fut.result()
                except (TuningError, ConvergenceError, ValueError):
                    pass
    else:
        for i, a in enumerate(grid):
            try:
                chi2[i] = _chi2_of(float(a), *args)
            except (TuningError, ConvergenceError, ValueError):
                pass

    ok = np.isfinite(chi2)
    failed = tuple(float(a) for a in grid[~ok])
    grid, chi2 = grid[ok], chi2[ok]
    if grid.size < 3:
        raise ValueError("no usable scattering-length candidates on the grid")

    def objective(a: float) -> float:
        try:
            return _chi2_of(a, *args)
        except (TuningError, ConvergenceError, ValueError):
            return math.inf

    minima = []
    for i in range(grid.size):
        left = chi2[i - 1] if i > 0 else math.inf
        right = chi2[i + 1] if i < grid.size - 1 else math.inf
        if not (chi2[i] <= left and chi2[i] <= right):
            continue
        if i == 0 or i == grid.size - 1:
            # edge minimum: keep the candidate, no refinement bracket
            a_min, c_min = float(grid[i]), float(chi2[i])
        else:
            res = minimize_scalar(
                objective,
                bracket=None,
                bounds=(float(grid[i - 1]), float(grid[i + 1])),
                method="bounded",
                options={"xatol": 0.002 * abs(grid[i])},
            )
            a_min, c_min = float(res.x), float(res.fun)
            if c_min > chi2[i]:
                a_min, c_min = float(grid[i]), float(chi2[i])
        minima.append((a_min, c_min))

    if not minima:
        raise ValueError("chi-square scan found no local minima")
    minima.sort(key=lambda m: m[1])
    c_best = minima[0][1]

    def halfwidth(a_min: float, c_min: float) -> float:
        # walk outward on each side to the delta-chi2 = 1 crossing,
        # interpolating linearly in chi2 between evaluations
        widths = []
        for sign in (-1.0, 1.0):
            step = 0.02 * abs(a_min) if a_min != 0.0 else 0.02 * abs(grid).min()
            a_prev, c_prev = a_min, c_min
            for _ in range(60):
                a_try = a_prev + sign * step
                c_try = objective(a_try)
                if not math.isfinite(c_try):
                    break
                if c_try >= c_min + _DELTA_CHI2:
                    frac = (c_min + _DELTA_CHI2 - c_prev) / (c_try - c_prev)
                    widths.append(abs(a_prev + sign * step * frac - a_min))
                    break
                a_prev, c_prev = a_try, c_try
                step *= 1.5
        if not widths:
            return math.nan
        return max(widths)

    refined = tuple(
        ChiSquareMinimum(
            a=a_min,
            chi2=c_min,
            sigma=halfwidth(a_min, c_min),
            relative_likelihood=math.exp(-0.5 * (c_min - c_best)),
        )
        for a_min, c_min in minima
    )
    best = refined[0]
    result = FitResult(
        names=("a_m",),
        values=(best.a,),
        sigmas=(best.sigma if math.isfinite(best.sigma) else 0.0,),
        covariance=np.array([[best.sigma**2 if math.isfinite(best.sigma) else 0.0]]),
        chi2=best.chi2,
        dof=len(data) - 1,
        notes=tuple(
            f"secondary minimum at a = {m.a_bohr:+.1f} a0 "
            f"(rel. likelihood {m.relative_likelihood:.3g})"
            for m in refined[1:]
        ),
    )
    return ScatteringLengthFit(
        candidates=grid, chi2=chi2, minima=refined, result=result, failed=failed
    )


def propagate_ratio(x: float, sx: float, y: float, sy: float) -> tuple[float, float]:
    """x/y with first-order uncertainty (relative errors in quadrature)."""
    if y == 0.0:
        raise ValueError("denominator must be nonzero")
    r = x / y
    sr = abs(r) * math.hypot(sx / x if x != 0.0 else 0.0, sy / y)
    return r, sr


def tof_temperature(widths, isotope: IsotopeParams, omega: float) -> FitResult:
    """Temperature and in-trap size from time-of-flight expansion widths.

    Straight-line fit of sigma^2 against t^2; the slope is k_B T / m and
    the intercept the in-trap width squared.  The returned ``insitu_pull``
    compares sigma0 * omega with sqrt(k_B T / m): near zero when the
    expansion is consistent with release from this trap axis.
    """
    pts = sorted((float(t), float(s)) for t, s in widths)
    if len(pts) < 2:
        raise ValueError("need at least 2 expansion times")
    t = np.array([p[0] for p in pts])
    s = np.array([p[1] for p in pts])
    x = t**2
    y = s**2
    if np.ptp(x) == 0.0:
        # all samples at one expansion time: slope (and T) undetermined
        return FitResult(
            names=("t_K", "sigma0_m", "insitu_pull"),
            values=(math.nan, float(np.sqrt(np.mean(y))), math.nan),
            sigmas=(math.nan, 0.0, math.nan),
            covariance=np.zeros((3, 3)),
            chi2=0.0,
            dof=0,
            notes=("degenerate: single expansion time, temperature unconstrained",),
        )

    # no width uncertainties are supplied; assume constant relative
    # noise (weights 1/y), the usual behavior of expansion imaging, and
    # set the absolute level from the residuals
    w = 1.0 / y
    a_mat = np.column_stack([w, w * x])
    coef, *_ = np.linalg.lstsq(a_mat, w * y, rcond=None)
    resid = w * y - a_mat @ coef
    dof = len(x) - 2
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov2 = s2 * np.linalg.inv(a_mat.T @ a_mat)
    intercept, slope = coef
    if slope <= 0.0:
        raise ValueError("widths shrink with expansion time")
    if intercept < 0.0:
        intercept = 0.0

    temperature = slope * isotope.mass / K_B
    sigma0 = math.sqrt(intercept)
    sig_t = math.sqrt(cov2[1, 1]) * isotope.mass / K_B
    sig_s0 = 0.5 * math.sqrt(cov2[0, 0]) / sigma0 if sigma0 > 0.0 else 0.0

    v_th = math.sqrt(slope)
    pull_num = sigma0 * omega - v_th
    pull_den = math.hypot(omega * sig_s0, 0.5 * math.sqrt(cov2[1, 1]) / v_th)
    pull = pull_num / pull_den if pull_den > 0.0 else math.inf

    chi2 = float(resid @ resid) / s2 if s2 > 0.0 else 0.0
    cov = np.zeros((3, 3))
    cov[0, 0] = sig_t**2
    cov[1, 1] = sig_s0**2
    cov[2, 2] = 1.0
    return FitResult(
        names=("t_K", "sigma0_m", "insitu_pull"),
        values=(float(temperature), float(sigma0), float(pull)),
        sigmas=(float(sig_t), float(sig_s0), 1.0),
        covariance=cov,
        chi2=chi2,
        dof=dof,
    )
