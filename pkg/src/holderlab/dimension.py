"""Packing counts, Hölder-band level sets and log-log dimension fits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .fitting import line_fit
from .parallel import ordered_map

DEDUP_RESOLUTION = 2.0 ** -52
POLYLINE_SUBSTEP = 0.25
HOLDER_SCAN_N = 2 ** 12


@dataclass(frozen=True)
class PointSet:
    """Finite subset of [0,1] or the plane, stored sorted (lexicographically in 2-D)."""

    points: np.ndarray
    ambient: int = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = np.sort(pts)
            if pts.size:
                keep = np.concatenate([[True], np.diff(pts) > DEDUP_RESOLUTION])
                pts = pts[keep]
            ambient = 1
        elif pts.ndim == 2 and pts.shape[1] == 2:
            pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
            if pts.shape[0]:
                step = np.abs(np.diff(pts, axis=0)).max(axis=1)
                pts = pts[np.concatenate([[True], step > DEDUP_RESOLUTION])]
            ambient = 2
        else:
            raise ValueError("points must have shape (n,) or (n, 2)")
        object.__setattr__(self, "points", np.ascontiguousarray(pts))
        object.__setattr__(self, "ambient", ambient)

    def __len__(self):
        return self.points.shape[0]


def pack_count(A: PointSet, r: float) -> int:
    """Greedy packing: scan in sorted order, keep a point if it is >= 2r (max norm) from all kept ones."""
    if r <= 0:
        raise ValueError("r must be positive")
    if len(A) == 0:
        return 0
    if A.ambient == 1:
        return int(_kernels.pack_sorted_1d(A.points, float(r)))
    return int(_kernels.pack_lex_2d(np.ascontiguousarray(A.points[:, 0]), np.ascontiguousarray(A.points[:, 1]),
                                    float(r)))


@dataclass(frozen=True)
class DimensionFit:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    stderr: float
    r2: float
    window: Tuple[int, int]
    residuals: np.ndarray = field(repr=False)
    degenerate: bool = False
    undefined: bool = False

    def to_rows(self):
        """(r, N, residual) per ladder entry; residual is empty outside the window."""
        lo, hi = self.window
        rows = []
        for j, (r, n) in enumerate(zip(self.scales, self.counts)):
            res = repr(float(self.residuals[j - lo])) if lo <= j < hi and self.residuals.size else ""
            rows.append((repr(float(r)), repr(float(n)), res))
        return rows

    def summary(self) -> dict:
        return {"slope": self.slope, "stderr": self.stderr, "r2": self.r2, "window": list(self.window),
                "degenerate": self.degenerate, "undefined": self.undefined}


def default_window(length: int) -> Tuple[int, int]:
    """Middle two-thirds of a ladder, keeping at least four entries."""
    drop = length // 6
    while drop > 0 and length - 2 * drop < 4:
        drop -= 1
    return drop, length - drop


def _undefined_fit(scales, counts, window):
    return DimensionFit(scales, counts, math.nan, math.nan, 0.0, window, np.zeros(0), False, True)


def dim_fit(scales: Sequence[float], counts: Sequence[float], window: Optional[Tuple[int, int]] = None) -> DimensionFit:
    """Least-squares slope of log N_j against -log r_j over ``window`` (half-open index range).

    A window containing an empty count gives an undefined fit; constant
    counts give slope 0 with the degenerate flag.
    """
    scales = np.asarray(scales, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if scales.shape != counts.shape:
        raise ValueError("scales and counts must match")
    window = default_window(scales.size) if window is None else (int(window[0]), int(window[1]))
    lo, hi = window
    if not 0 <= lo < hi <= scales.size or hi - lo < 4:
        raise ValueError("window must select at least 4 ladder entries")
    if np.any(counts[lo:hi] <= 0):
        return _undefined_fit(scales, counts, window)
    fit = line_fit(-np.log(scales[lo:hi]), np.log(counts[lo:hi]))
    return DimensionFit(scales, counts, fit.slope, fit.stderr, fit.r2, window, fit.residuals, fit.degenerate)


# ---------------------------------------------------------------------------
# level sets


def level_set(f, y: float, n: int, eps: float) -> PointSet:
    """Closed-grid points i/n with |f(i/n) - y| <= eps."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    vals = f.on_grid(n)
    return PointSet(np.flatnonzero(np.abs(vals - y) <= eps) / n)


class LevelSetSampler:
    """Band counts for many levels from one evaluation on the finest grid.

    ``values`` may replace ``f`` (then ``alpha`` is required): they are the
    closed-grid values at the finest ladder entry. The band constant defaults
    to the Hölder-ratio maximum on the grid of size min(4096, finest).
    Coarser ladder grids are exact subsamples of the finest one. For each
    grid the values are sorted once, so a band {|f - y| <= eps} is a
    contiguous slice of the sort order.
    """

    def __init__(self, f, ladder: Sequence[int], C: Optional[float] = None, values: Optional[np.ndarray] = None,
                 alpha: Optional[float] = None):
        ladder = [int(n) for n in ladder]
        if len(ladder) < 4 or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("ladder must be ascending with at least 4 entries")
        top = ladder[-1]
        if any(top % n for n in ladder):
            raise ValueError("every ladder entry must divide the finest one")
        self.ladder = ladder
        self.alpha = f.alpha if alpha is None else float(alpha)
        self.values = f.on_grid(top) if values is None else np.asarray(values, dtype=float)
        if C is None:
            m = min(HOLDER_SCAN_N, top)
            C = _kernels.holder_ratio_max(np.ascontiguousarray(self.values[:: top // m]), self.alpha, float(m))
        self.C = float(C)
        self._grids = []
        for n in ladder:
            v = self.values[:: top // n]
            order = np.argsort(v, kind="stable")
            self._grids.append((v[order], order))

    def eps(self, n: int) -> float:
        return self.C * n ** (-self.alpha)

    def band_indices(self, j: int, y: float) -> np.ndarray:
        sv, order = self._grids[j]
        e = self.eps(self.ladder[j])
        lo = np.searchsorted(sv, y - e, side="left")
        hi = np.searchsorted(sv, y + e, side="right")
        return np.sort(order[lo:hi])

    def counts(self, y: float) -> np.ndarray:
        """Greedy packing count of the band set at r_j = 1/n_j (index gap >= 2) for each ladder entry."""
        return np.array([_kernels.pack_sorted_indices(self.band_indices(j, y), 2) for j in range(len(self.ladder))])

    def fit(self, y: float, window: Optional[Tuple[int, int]] = None) -> DimensionFit:
        counts = self.counts(y)
        scales = 1.0 / np.asarray(self.ladder, dtype=float)
        if counts[0] == 0:
            return _undefined_fit(scales, counts.astype(float),
                                  default_window(len(self.ladder)) if window is None else tuple(window))
        return dim_fit(scales, counts, window)


def level_dim(f, y: float, ladder: Sequence[int], C: Optional[float] = None,
              window: Optional[Tuple[int, int]] = None) -> DimensionFit:
    """Packing-dimension fit of the band sets with eps_j = C n_j^-alpha at r_j = 1/n_j."""
    return LevelSetSampler(f, ladder, C).fit(y, window)


# ---------------------------------------------------------------------------
# graphs


def graph_dim(f, ladder: Sequence[int], n: Optional[int] = None, window: Optional[Tuple[int, int]] = None,
              substep: float = POLYLINE_SUBSTEP, threads: Optional[int] = None) -> DimensionFit:
    """Packing-dimension fit of the graph at r_j = 1/n_j.

    The graph is sampled on the closed grid with ``n`` cells (default
    64 * max(ladder)) and packed along its piecewise-linear interpolant, with
    candidate centres at most ``substep * r`` apart, so steep segments are not
    undercounted between samples.
    """
    ladder = [int(v) for v in ladder]
    if len(ladder) < 4:
        raise ValueError("ladder needs at least 4 entries")
    n = 64 * max(ladder) if n is None else int(n)
    xs = np.arange(n + 1) / n
    ys = np.ascontiguousarray(f.on_grid(n), dtype=float)
    counts = ordered_map(lambda m: _kernels.pack_polyline(xs, ys, 1.0 / m, substep), ladder, threads)
    return dim_fit(1.0 / np.asarray(ladder, dtype=float), counts, window)


def fit_to_csv(fit: DimensionFit, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "N", "residual"])
        w.writerows(fit.to_rows())
