"""Figure rendering for profiles, ladders, and experiment reports.

Figures are written straight to files (Agg backend, no display) next to the
CSV/JSON outputs they visualize.  Log-log panels show the measured series
together with the fitted power law.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .approximation import ApproxProfile
from .norms import SideDiagonalProfile

FIGSIZE = (6.0, 4.0)


def _loglog_panel(ax, xs, ys, label: str) -> None:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = ys > 0
    ax.loglog(xs[keep], ys[keep], "o-", markersize=3, label=label)


def _fit_line(ax, fit: dict, label: str) -> None:
    xs = np.asarray(fit.get("xs", ()), dtype=float)
    if len(xs) < 2:
        return
    grid = np.array([xs.min(), xs.max()])
    line = np.exp(fit["intercept"]) * grid ** (-fit["exponent"])
    ax.loglog(grid, line, "--", linewidth=1,
              label=f"{label}: slope -{fit['exponent']:.2f}")


def save_profile_figure(profile: SideDiagonalProfile, path: str | Path,
                        title: str = "side-diagonal profile") -> Path:
    s, y = profile.shell_collapse()
    fig, ax = plt.subplots(figsize=FIGSIZE)
    _loglog_panel(ax, 1.0 + s, y, "shell max")
    ax.set_xlabel("1 + |m|")
    ax.set_ylabel("per-diagonal value")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return Path(path)


def save_approx_figure(profile: ApproxProfile, path: str | Path,
                       title: str = "banded approximation error") -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    _loglog_panel(ax, 1.0 + profile.bandwidths(), profile.errors(),
                  f"E_N ({profile.tag}, {profile.flag})")
    ax.set_xlabel("1 + N")
    ax.set_ylabel("E_N")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return Path(path)


def save_hz_breakdown_figure(rows, path: str | Path,
                             title: str = "seminorm probe breakdown") -> Path:
    abs_t = [sum(abs(x) for x in t) for t, _ in rows]
    values = [v for _, v in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.loglog(abs_t, values, "o", markersize=3)
    ax.set_xlabel("|t|")
    ax.set_ylabel("|t|^-eta |second difference|")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return Path(path)


def save_report_figure(report: dict, path: str | Path) -> Path:
    """Render the fitted series of an experiment report to one figure."""
    fits = report.get("fits", {})
    fig, ax = plt.subplots(figsize=FIGSIZE)
    plotted = False
    for name, fit in sorted(fits.items()):
        xs, ys = fit.get("xs", ()), fit.get("ys", ())
        if len(xs) >= 2:
            _loglog_panel(ax, xs, ys, name)
            _fit_line(ax, fit, name)
            plotted = True
    if not plotted:
        norms = report.get("norms", {})
        names = sorted(norms)
        ax = fig.gca()
        ax.set_xscale("linear")
        ax.set_yscale("log" if norms and min(norms.values()) > 0 else "linear")
        ax.bar(range(len(names)), [norms[n] for n in names])
        ax.set_xticks(range(len(names)), names, rotation=30, ha="right", fontsize=7)
        ax.set_ylabel("value")
    else:
        ax.set_xlabel("scale")
        ax.set_ylabel("value")
        ax.legend(fontsize=7)
        ax.grid(True, which="both", alpha=0.3)
    verdict = "pass" if report.get("pass") else "fail"
    ax.set_title(f"{report.get('kind', 'experiment')} ({verdict})")
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return Path(path)
