"""Discrete measures: lifts of Lebesgue measure to graphs, projections,
Fourier transforms, Riesz energies, and local mass estimators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .fitting import line_fit

SAMPLES_PER_BAND = 16
DIVERGENCE_TOLERANCE = 0.15


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud; ``points`` has shape (n,) in 1-D or (n, 2) in 2-D."""

    points: np.ndarray
    weights: np.ndarray
    total_mass: float = field(init=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if pts.ndim not in (1, 2) or (pts.ndim == 2 and pts.shape[1] != 2):
            raise ValueError("points must have shape (n,) or (n, 2)")
        if w.ndim != 1 or w.size != pts.shape[0]:
            raise ValueError("weights and points must have the same length")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_mass", math.fsum(w))

    @property
    def dim(self) -> int:
        return 1 if self.points.ndim == 1 else 2

    def __len__(self):
        return self.weights.size

    def subsample(self, step: int = 2) -> "DiscreteMeasure":
        """Every ``step``-th atom, reweighted to keep the total mass."""
        w = self.weights[::step]
        return DiscreteMeasure(self.points[::step], w * (self.total_mass / math.fsum(w)))


def empty_measure(dim: int = 1) -> DiscreteMeasure:
    shape = (0,) if dim == 1 else (0, 2)
    return DiscreteMeasure(np.zeros(shape), np.zeros(0))


def uniform_measure(n: int) -> DiscreteMeasure:
    """Midpoint grid approximation of Lebesgue measure on [0, 1]."""
    return DiscreteMeasure((np.arange(n) + 0.5) / n, np.full(n, 1.0 / n))


def density_measure(density, n: int) -> DiscreteMeasure:
    """Midpoint-rule discretisation of a density on [0, 1]; zero-density cells dropped."""
    x = (np.arange(n) + 0.5) / n
    w = np.asarray(density(x), dtype=float) / n
    keep = w > 0
    return DiscreteMeasure(x[keep], w[keep])


def point_mass(y: float = 0.0, mass: float = 1.0) -> DiscreteMeasure:
    return DiscreteMeasure(np.array([float(y)]), np.array([float(mass)]))


def lift_measure(f, n: int) -> DiscreteMeasure:
    """Atoms (x_i, f(x_i)) at midpoints x_i = (i + 1/2)/n, each of mass 1/n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = (np.arange(n) + 0.5) / n
    return DiscreteMeasure(np.column_stack([x, f.at_midpoints(n)]), np.full(n, 1.0 / n))


def cos_sin(theta: float):
    """cos and sin with exact values at multiples of pi/2."""
    quarter = theta / (np.pi / 2)
    if quarter == round(quarter):
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(round(quarter)) % 4]
    return math.cos(theta), math.sin(theta)


def projection(points: np.ndarray, theta: float) -> np.ndarray:
    c, s = cos_sin(theta)
    if c == 0.0:
        return s * points[:, 1]
    if s == 0.0:
        return c * points[:, 0]
    return c * points[:, 0] + s * points[:, 1]


def project(mu: DiscreteMeasure, theta: float) -> DiscreteMeasure:
    if mu.dim != 2:
        raise ValueError("project needs a 2-D measure")
    return DiscreteMeasure(projection(mu.points, theta), mu.weights)


# ---------------------------------------------------------------------------
# Fourier transforms


def fourier(mu: DiscreteMeasure, xi):
    """Sum of w_j exp(i xi y_j); scalar xi gives a complex scalar."""
    if mu.dim != 1:
        raise ValueError("fourier needs a 1-D measure")
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    re, im = _kernels.fourier_direct(mu.points, mu.weights, xi_arr)
    out = re + 1j * im
    out[xi_arr == 0.0] = mu.total_mass
    return complex(out[0]) if np.ndim(xi) == 0 else out


def fourier_uniform(mu: DiscreteMeasure, xi0: float, dxi: float, m: int) -> np.ndarray:
    """Transform at xi0 + k dxi for k < m, by phase rotation; O(n m) without trig calls."""
    re, im = _kernels.fourier_uniform(mu.points, mu.weights, float(xi0), float(dxi), int(m))
    out = re + 1j * im
    if xi0 == 0.0 and m > 0:
        out[0] = mu.total_mass
    return out


def aliasing_limit(mu: DiscreteMeasure) -> float:
    """pi / h with h the median gap between sorted distinct positions.

    For the n-point grid on [0, 1] this is pi*n; a single atom has no limit.
    """
    gaps = np.diff(np.unique(mu.points))
    return math.inf if gaps.size == 0 else float(np.pi / np.median(gaps))


@dataclass(frozen=True)
class FourierProfile:
    frequencies: np.ndarray
    values: np.ndarray
    band_averages: np.ndarray  # rows (band centre, mean |mu^|^2)


@dataclass(frozen=True)
class DecayFit:
    eta: float
    stderr: float
    r2: float
    flagged: bool
    profile: FourierProfile


def band_frequencies(bands: Sequence[float], samples: int = SAMPLES_PER_BAND) -> np.ndarray:
    """``samples`` log-spaced frequencies in each band [b, 2b)."""
    return np.concatenate([np.geomspace(b, 2.0 * b, samples, endpoint=False) for b in bands])


def fourier_profile(mu: DiscreteMeasure, bands: Sequence[float], samples: int = SAMPLES_PER_BAND) -> FourierProfile:
    bands = np.asarray(bands, dtype=float)
    if np.any(bands <= 0):
        raise ValueError("band edges must be positive")
    xi = band_frequencies(bands, samples)
    if xi.max() * 2.0 ** (1.0 / samples) > aliasing_limit(mu):
        raise ValueError("band ceiling exceeds the aliasing limit pi*n")
    vals = fourier(mu, xi)
    power = (np.abs(vals) ** 2).reshape(bands.size, samples).mean(axis=1)
    return FourierProfile(xi, vals, np.column_stack([bands * np.sqrt(2.0), power]))


def dyadic_bands(lo_exp: int, hi_exp: int):
    """Band edges 2**k for k = lo_exp..hi_exp-1, covering [2**lo_exp, 2**hi_exp)."""
    return [2.0 ** k for k in range(lo_exp, hi_exp)]


def decay_exponent(mu: DiscreteMeasure, bands: Sequence[float], samples: int = SAMPLES_PER_BAND) -> DecayFit:
    """Negated log-log slope of band-averaged |mu^|^2 against band centre.

    Flagged when the fit explains less than half the variance.
    """
    if len(bands) < 4:
        raise ValueError("need at least 4 bands")
    prof = fourier_profile(mu, bands, samples)
    centres, power = prof.band_averages[:, 0], prof.band_averages[:, 1]
    fit = line_fit(np.log(centres), np.log(np.maximum(power, 1e-300)))
    return DecayFit(-fit.slope, fit.stderr, fit.r2, fit.r2 < 0.5, prof)


@dataclass(frozen=True)
class SobolevTrace:
    cutoffs: np.ndarray
    integrals: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.integrals[1:] / self.integrals[:-1]

    def bounded(self, tol: float = 0.1) -> bool:
        """Last doubling grows by at most 1 + tol."""
        return bool(self.ratios.size and self.ratios[-1] <= 1.0 + tol)


def sobolev_integral(mu: DiscreteMeasure, beta: float, cutoff: float, levels: int,
                     step: Optional[float] = None) -> SobolevTrace:
    """Trapezoid integrals of |xi|^beta |mu^(xi)|^2 over [-X, X] for X = cutoff * 2**k, k = 0..levels.

    The integrand is even for real measures, so twice the half-line integral
    is used. The default step resolves oscillations of period 2*pi/span.
    """
    if mu.dim != 1:
        raise ValueError("sobolev_integral needs a 1-D measure")
    top = cutoff * 2.0 ** levels
    if top > aliasing_limit(mu):
        raise ValueError("top cutoff exceeds the aliasing limit pi*n")
    if step is None:
        span = float(mu.points.max() - mu.points.min()) if len(mu) else 0.0
        step = np.pi / (8.0 * max(span, 1.0))
    per_unit = int(math.ceil(cutoff / step))
    h = cutoff / per_unit
    m = per_unit * 2 ** levels + 1
    xi = h * np.arange(m)
    integrand = xi ** beta * np.abs(fourier_uniform(mu, 0.0, h, m)) ** 2
    cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (integrand[1:] + integrand[:-1]))])
    idx = per_unit * 2 ** np.arange(levels + 1)
    return SobolevTrace(cutoff * 2.0 ** np.arange(levels + 1), 2.0 * cum[idx])


# ---------------------------------------------------------------------------
# energies


@dataclass(frozen=True)
class EnergyEstimate:
    s: float
    value: float
    n: int
    convergence_ratio: float
    diverging: bool
    coincident: bool = False


def pair_energy(mu: DiscreteMeasure, s: float):
    """Off-diagonal sum of w_i w_j |p_i - p_j|^-s (max norm); returns (value, coincident)."""
    if mu.dim == 1:
        return _kernels.pair_energy_1d(mu.points, mu.weights, float(s))
    return _kernels.pair_energy_2d(np.ascontiguousarray(mu.points[:, 0]), np.ascontiguousarray(mu.points[:, 1]),
                                   mu.weights, float(s))


def energy(mu: DiscreteMeasure, s: float, divergence_tol: float = DIVERGENCE_TOLERANCE) -> EnergyEstimate:
    """Riesz s-energy with a resolution check against the every-other-atom subsample.

    ``diverging`` is set when two atoms coincide or when halving the
    resolution changes the value by more than the factor 1 + divergence_tol.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if len(mu) < 2:
        return EnergyEstimate(s, 0.0, len(mu), 1.0, False)
    value, coincident = pair_energy(mu, s)
    if coincident:
        return EnergyEstimate(s, math.inf, len(mu), math.inf, True, True)
    ratio = 1.0
    if len(mu) >= 4:
        half, half_coincident = pair_energy(mu.subsample(2), s)
        ratio = value / half if half > 0 else (1.0 if value == 0 else math.inf)
    return EnergyEstimate(s, float(value), len(mu), float(ratio), bool(ratio > 1.0 + divergence_tol))


# ---------------------------------------------------------------------------
# local mass


def ball_mass(mu: DiscreteMeasure, y: float, r: float) -> float:
    """Mass of the closed ball |p - y| <= r for a 1-D measure."""
    return float(mu.weights[np.abs(mu.points - y) <= r].sum())


def ball_masses(mu: DiscreteMeasure, y: float, radii) -> np.ndarray:
    order = np.argsort(mu.points, kind="stable")
    pos = mu.points[order]
    cum = np.concatenate([[0.0], np.cumsum(mu.weights[order])])
    radii = np.asarray(radii, dtype=float)
    lo = np.searchsorted(pos, y - radii, side="left")
    hi = np.searchsorted(pos, y + radii, side="right")
    return cum[hi] - cum[lo]


@dataclass(frozen=True)
class LocalDimension:
    value: float
    r2: float
    undefined: bool


def local_dimension(mu: DiscreteMeasure, y: float, radii: Sequence[float]) -> LocalDimension:
    """Log-log slope of mu(B(y, r)) against r; empty balls are left out of the fit."""
    if mu.dim != 1:
        raise ValueError("local_dimension needs a 1-D measure")
    radii = np.asarray(radii, dtype=float)
    if radii.size < 4:
        raise ValueError("need at least 4 radii")
    masses = ball_masses(mu, y, radii)
    keep = masses > 0
    if keep.sum() < 2:
        return LocalDimension(math.nan, 0.0, True)
    fit = line_fit(np.log(radii[keep]), np.log(masses[keep]))
    return LocalDimension(fit.slope, fit.r2, False)


def density_estimate(mu: DiscreteMeasure, y: float, r: float) -> float:
    """mu(B(y, r)) / 2r."""
    if r <= 0:
        raise ValueError("r must be positive")
    return ball_mass(mu, y, r) / (2.0 * r)


# ---------------------------------------------------------------------------
# CSV round trip


def measure_to_csv(mu: DiscreteMeasure, path) -> None:
    header = ["position", "weight"] if mu.dim == 1 else ["x", "y", "weight"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        pts = mu.points.reshape(len(mu), -1)
        for p, wt in zip(pts, mu.weights):
            w.writerow([repr(float(v)) for v in p] + [repr(float(wt))])


def measure_from_csv(path) -> DiscreteMeasure:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header not in (["position", "weight"], ["x", "y", "weight"]):
        raise ValueError(f"unrecognised measure header {header}")
    data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))
    pts = data[:, 0] if len(header) == 2 else data[:, :2]
    return DiscreteMeasure(pts, data[:, -1])
