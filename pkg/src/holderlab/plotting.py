"""Byte-deterministic SVG log-log plots of fits."""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dimension import DimensionFit  # noqa: E402
from .measures import DecayFit  # noqa: E402

_RC = {"svg.hashsalt": "holderlab", "svg.fonttype": "none", "path.simplify": False}


@dataclass(frozen=True)
class LogLogSeries:
    """Generic log-log data with a fitted line log y = slope log x + intercept over the fit range."""

    x: np.ndarray
    y: np.ndarray
    slope: float
    intercept: float
    fit_lo: int = 0
    fit_hi: int = -1
    xlabel: str = "x"
    ylabel: str = "y"
    label: str = "slope"


def _as_series(obj) -> LogLogSeries:
    if isinstance(obj, LogLogSeries):
        return obj
    if isinstance(obj, DimensionFit):
        x = 1.0 / np.asarray(obj.scales, dtype=float)
        y = np.asarray(obj.counts, dtype=float)
        lo, hi = obj.window
        keep = y[lo:hi] > 0
        inter = 0.0
        if keep.any() and np.isfinite(obj.slope):
            inter = float(np.mean(np.log(y[lo:hi][keep]) - obj.slope * np.log(x[lo:hi][keep])))
        return LogLogSeries(x, y, obj.slope, inter, lo, hi, "1/r", "packing count N", "slope")
    if isinstance(obj, DecayFit):
        x, y = obj.profile.band_averages[:, 0], obj.profile.band_averages[:, 1]
        inter = float(np.mean(np.log(y) + obj.eta * np.log(x)))
        return LogLogSeries(x, y, -obj.eta, inter, 0, x.size, "frequency", "mean power", "slope")
    raise TypeError(f"cannot plot {type(obj).__name__}")


def emit_plot(obj, path, title: str = "") -> str:
    """Write a log-log scatter with its fitted line and a slope annotation to ``path`` (SVG)."""
    s = _as_series(obj)
    x, y = np.asarray(s.x, dtype=float), np.asarray(s.y, dtype=float)
    good = (x > 0) & (y > 0)
    if good.sum() < 2:
        raise ValueError("need at least two positive data points to plot")
    if not os.path.isdir(os.path.dirname(os.path.abspath(path))):
        raise OSError(f"directory of {path} does not exist")
    hi = x.size if s.fit_hi < 0 else s.fit_hi
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.loglog(x[good], y[good], "o", color="C0")
        if np.isfinite(s.slope):
            xl = x[s.fit_lo:hi]
            ax.loglog(xl, np.exp(s.intercept) * xl ** s.slope, "-", color="C1")
        ax.text(0.05, 0.92, f"{s.label} = {s.slope:.3f}", transform=ax.transAxes)
        ax.set_xlabel(s.xlabel)
        ax.set_ylabel(s.ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
