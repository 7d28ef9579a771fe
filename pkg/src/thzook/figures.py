"""Matplotlib renderers: one PNG per sweep report, written next to the tables.

Model rows (n == 0) draw as dashed lines; measured rows carry their
confidence intervals. BER points with zero observed errors are drawn as
downward triangles at the interval's upper edge, since only an upper bound
is known there.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be fixed first
import numpy as np  # noqa: E402

from thzook.montecarlo import ExperimentReport  # noqa: E402

__all__ = ["render_report"]

_X_LABELS = {
    "snr_db": "SNR (dB)",
    "power_dbm": "transmit power (dBm)",
    "beta_br": "broadening factor",
    "n_bits": "stream length (bits)",
    "p_one": "probability of a 1 bit",
}

_Y_LABELS = {
    "ber-vs-snr": "bit error rate",
    "ber-vs-power": "bit error rate",
    "ee-vs-beta": "transmit-energy saving fraction",
    "energy-vs-n": "total event energy (J)",
    "tx-events": "transmission events per bit",
}


def _split_series(report: ExperimentReport):
    measured, models = [], []
    for scheme in report.schemes():
        s = report.series(scheme)
        (models if int(s["n"].max()) == 0 else measured).append((scheme, s))
    return measured, models


def _render_ber(report: ExperimentReport, ax) -> None:
    ax.set_yscale("log")
    measured, models = _split_series(report)
    for scheme, s in measured:
        floor = 0.5 / max(1, int(s["n"].max()))
        band_lo = np.maximum(s["ci_lo"], floor)
        band_hi = np.maximum(s["ci_hi"], floor)
        pos = s["mean"] > 0.0
        line = ax.plot(s["x"][pos], s["mean"][pos], marker="o", label=scheme)[0]
        color = line.get_color()
        ax.fill_between(s["x"], band_lo, band_hi, alpha=0.2, color=color)
        if np.any(~pos):
            ax.plot(
                s["x"][~pos],
                band_hi[~pos],
                marker="v",
                linestyle="none",
                color=color,
            )
    for scheme, s in models:
        ax.plot(s["x"], s["mean"], linestyle="--", label=scheme)


def _render_lines(report: ExperimentReport, ax, log_x=False, log_y=False) -> None:
    if log_x:
        ax.set_xscale("log")
    if log_y:
        ax.set_yscale("log")
    measured, models = _split_series(report)
    for scheme, s in measured:
        yerr = np.vstack([s["mean"] - s["ci_lo"], s["ci_hi"] - s["mean"]])
        ax.errorbar(s["x"], s["mean"], yerr=yerr, marker="o", capsize=3, label=scheme)
    for scheme, s in models:
        ax.plot(s["x"], s["mean"], linestyle="--", label=scheme)


def render_report(report: ExperimentReport, path) -> Path:
    """Draw the report as a single figure and save it to ``path``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if report.kind in ("ber-vs-snr", "ber-vs-power"):
        _render_ber(report, ax)
    elif report.kind == "energy-vs-n":
        _render_lines(report, ax, log_x=True, log_y=True)
    else:
        _render_lines(report, ax)
    ax.set_xlabel(_X_LABELS.get(report.x_label, report.x_label))
    ax.set_ylabel(_Y_LABELS.get(report.kind, report.kind))
    ax.set_title(report.kind)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    sha = report.meta.get("config_sha256")
    meta = {"config_sha256": str(sha)} if sha is not None else None
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata=meta)
    plt.close(fig)
    return Path(path)
