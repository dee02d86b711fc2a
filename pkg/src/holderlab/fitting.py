"""Least-squares line fits in log-log coordinates."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    stderr: float
    r2: float
    residuals: np.ndarray
    degenerate: bool


def line_fit(x, y) -> LineFit:
    """Ordinary least squares y ~ slope*x + intercept.

    ``degenerate`` marks a constant response (slope 0). R^2 is 1 for an exact
    fit, including the constant case.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two matching points")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("abscissae are all equal")
    dy = y - ym
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    degenerate = bool(np.all(y == y[0]))
    if degenerate:
        slope, intercept, resid, ss_res = 0.0, float(y[0]), np.zeros_like(y), 0.0
    if ss_tot > 0.0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    stderr = float(np.sqrt(ss_res / (x.size - 2) / sxx)) if x.size > 2 else 0.0
    return LineFit(slope, intercept, stderr, r2, resid, degenerate)
