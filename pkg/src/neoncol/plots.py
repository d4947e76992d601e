"""Figure rendering for the CLI report path.

Every CSV artifact a command emits gets a matplotlib rendering next to
it.  The Agg backend is forced so the pipeline runs headless, and the
figures carry no timestamps, keeping reruns byte-stable.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .constants import BOHR_RADIUS

_DPI = 150


def _save(fig, path) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)


def plot_relaxation_curves(curves, path, data=None) -> None:
    """sigma_rel(T) on log axes, one line per scattering length."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    for curve in curves:
        if np.isnan(curve.a):
            label = "unitarity limit"
            style = dict(ls="--", color="0.4")
        else:
            label = f"a = {curve.a / BOHR_RADIUS:+.0f} $a_0$"
            style = {}
        ax.loglog(curve.temperature * 1e6, curve.sigma_rel, label=label, **style)
    if data:
        ax.errorbar(
            [d.t_mean * 1e6 for d in data],
            [d.sigma_rel for d in data],
            yerr=[d.sigma_uncertainty for d in data],
            fmt="o",
            color="k",
            ms=4,
            capsize=3,
            label="data",
        )
    ax.set_xlabel(r"$\bar{T}$ ($\mu$K)")
    ax.set_ylabel(r"$\sigma_{\mathrm{rel}}$ (m$^2$)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_decay_line(x, y, fit, path) -> None:
    """Linearized decay observables with the fitted line."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.plot(x, y, "o", ms=4)
    alpha, beta = fit.values[0], fit.values[1]
    xs = np.linspace(0.0, float(np.max(x)) * 1.05, 50)
    ax.plot(xs, -alpha - beta * xs, "-", color="C3")
    ax.set_xlabel(r"$\langle \bar{n} \rangle_t$ (m$^{-3}$)")
    ax.set_ylabel(r"$t^{-1}\,\ln[N(t)/N(0)]$ (s$^{-1}$)")
    fig.tight_layout()
    _save(fig, path)


def plot_heating(t, t_mean, path) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.plot(t, np.asarray(t_mean) * 1e6, "o-", ms=3)
    ax.set_xlabel("t (s)")
    ax.set_ylabel(r"$\bar{T}$ ($\mu$K)")
    fig.tight_layout()
    _save(fig, path)


def plot_aspect_fit(t_star, aspect, fit, path) -> None:
    """Aspect-ratio series in rescaled time with the exponential fit."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.plot(t_star, aspect, "o", ms=3, label="data")
    gamma, a_eq, a0 = fit.values[0], fit.values[1], fit.values[2]
    ts = np.linspace(0.0, float(t_star[-1]), 200)
    ax.plot(ts, a_eq + (a0 - a_eq) * np.exp(-gamma * ts), "-", color="C3", label="fit")
    ax.set_xlabel(r"$t^{*}$ (s)")
    ax.set_ylabel("aspect ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_chi2_scan(scan, path) -> None:
    """Chi-square against candidate scattering length, split by sign."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    a0 = scan.candidates / BOHR_RADIUS
    for sel, label in ((a0 < 0, "a < 0"), (a0 > 0, "a > 0")):
        if np.any(sel):
            ax.semilogx(np.abs(a0[sel]), scan.chi2[sel], "o-", ms=3, label=label)
    for m in scan.minima:
        ax.axvline(abs(m.a_bohr), color="0.7", lw=0.6, zorder=0)
    ax.set_xlabel(r"$|a|$ ($a_0$)")
    ax.set_ylabel(r"$\chi^2$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_trace(trace, path) -> None:
    """DSMC trace: aspect ratio and temperatures over time."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.2, 5.6), sharex=True)
    ax1.plot(trace.time, trace.aspect, lw=0.8)
    ax1.set_ylabel("aspect ratio")
    ax2.plot(trace.time, trace.t_x * 1e6, lw=0.8, label=r"$T_x$")
    ax2.plot(trace.time, trace.t_r * 1e6, lw=0.8, label=r"$T_r$")
    ax2.set_xlabel("t (s)")
    ax2.set_ylabel(r"T ($\mu$K)")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_gamma_vs_density(nbar, gamma, gamma_err, path) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.errorbar(nbar, gamma, yerr=gamma_err, fmt="o", ms=4, capsize=3)
    nb = np.asarray(nbar, dtype=float)
    g = np.asarray(gamma, dtype=float)
    slope = float(np.sum(nb * g) / np.sum(nb * nb))
    xs = np.linspace(0.0, nb.max() * 1.05, 50)
    ax.plot(xs, slope * xs, "-", color="C3")
    ax.set_xlabel(r"$\bar{n}(0)$ (m$^{-3}$)")
    ax.set_ylabel(r"$\gamma_{\mathrm{rel}}$ (s$^{-1}$)")
    fig.tight_layout()
    _save(fig, path)
