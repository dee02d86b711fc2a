"""Band restrictions of planar measures to slices proj_theta = y, their
energies, and a Riemann-sum check of the disintegration identity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .measures import (DiscreteMeasure, EnergyEstimate, density_estimate, empty_measure, energy, pair_energy,
                       project, projection)
from .parallel import ordered_map

STABILITY_TOLERANCE = 0.2


@dataclass(frozen=True)
class BandMeasure:
    base: DiscreteMeasure
    theta: float
    y: float
    r: float
    restricted: DiscreteMeasure

    @property
    def band_mass(self) -> float:
        """Unnormalised mass of the base measure inside the band."""
        return self.restricted.total_mass * 2.0 * self.r


def band_measure(mu: DiscreteMeasure, theta: float, y: float, r: float) -> BandMeasure:
    """Restrict mu to |proj_theta - y| < r and scale weights by 1/2r."""
    if r <= 0:
        raise ValueError("r must be positive")
    inside = np.abs(projection(mu.points, theta) - y) < r
    if not inside.any():
        return BandMeasure(mu, theta, y, r, empty_measure(2))
    return BandMeasure(mu, theta, y, r, DiscreteMeasure(mu.points[inside], mu.weights[inside] / (2.0 * r)))


def disintegration_grid(lo: float, hi: float, r: float, delta: float) -> np.ndarray:
    """Levels mid + (k + 1/2) delta covering [lo - r, hi + r], mid the hull centre."""
    mid = 0.5 * (lo + hi)
    k = int(math.ceil((0.5 * (hi - lo) + r) / delta))
    return mid + (np.arange(-k - 1, k + 1) + 0.5) * delta


def disintegration_defect(mu: DiscreteMeasure, theta: float, r: float, delta: float) -> float:
    """|sum over the level grid of (normalised band mass) * delta - total mass|."""
    if r <= 0 or delta <= 0:
        raise ValueError("r and delta must be positive")
    if delta > r:
        raise ValueError("grid spacing must not exceed the band radius")
    if len(mu) == 0:
        return 0.0
    pos = projection(mu.points, theta)
    order = np.argsort(pos, kind="stable")
    sp = pos[order]
    cum = np.concatenate([[0.0], np.cumsum(mu.weights[order])])
    ys = disintegration_grid(sp[0], sp[-1], r, delta)
    lo = np.searchsorted(sp, ys - r, side="right")
    hi = np.searchsorted(sp, ys + r, side="left")
    band = cum[hi] - cum[lo]
    return abs(math.fsum(band * (delta / (2.0 * r))) - mu.total_mass)


def slice_energy(nu: BandMeasure, s: float) -> EnergyEstimate:
    """Off-diagonal energy of the normalised band measure (0 for at most one atom)."""
    return energy(nu.restricted, s)


def _band_energy(nu: BandMeasure, s: float) -> float:
    # the half-resolution subsample of energy() is not needed here; stability
    # comes from halving r instead
    if len(nu.restricted) < 2:
        return 0.0
    value, coincident = pair_energy(nu.restricted, s)
    return math.inf if coincident else float(value)


def slice_levels(mu: DiscreteMeasure, theta: float, count: int = 128, central: float = 0.8) -> np.ndarray:
    """``count`` equally spaced levels across the central fraction of the projection hull."""
    pos = projection(mu.points, theta)
    lo, hi = float(pos.min()), float(pos.max())
    pad = 0.5 * (1.0 - central) * (hi - lo)
    return np.linspace(lo + pad, hi - pad, count)


@dataclass(frozen=True)
class SliceRow:
    theta: float
    y: float
    r: float
    band_mass: float
    density: float
    energies: tuple  # one value per s at radius r
    stability: tuple  # energy(r/2) / energy(r) per s

    def stable(self, tol: float = STABILITY_TOLERANCE) -> bool:
        """Finite, positive energies that change by at most tol when r halves."""
        return all(math.isfinite(e) and e > 0 and abs(q - 1.0) <= tol for e, q in zip(self.energies, self.stability))


def slice_row(mu: DiscreteMeasure, theta: float, y: float, r: float, s_values: Sequence[float]) -> SliceRow:
    wide = band_measure(mu, theta, y, r)
    narrow = band_measure(mu, theta, y, r / 2.0)
    energies, ratios = [], []
    for s in s_values:
        e1 = _band_energy(wide, s)
        e2 = _band_energy(narrow, s)
        energies.append(e1)
        ratios.append(e2 / e1 if e1 > 0 and math.isfinite(e1) else math.nan)
    dens = density_estimate(project(mu, theta), y, r)
    return SliceRow(theta, float(y), r, wide.band_mass, dens, tuple(energies), tuple(ratios))


def slice_report(mu: DiscreteMeasure, theta: float, levels: Sequence[float], r: float, s_values: Sequence[float],
                 threads: Optional[int] = None):
    return ordered_map(lambda y: slice_row(mu, theta, y, r, s_values), list(levels), threads)
