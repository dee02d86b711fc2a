"""Desk-scale verification runs over sampled probe perturbations.

Every run draws M perturbation vectors t uniformly from the max-norm ball
B(t0, rho), builds f_t = f + <t, Phi>, applies an estimator per sample and
reports pass fractions. Nothing here proves an almost-everywhere statement;
reports always carry M, rho and the resolution ladder used.
"""

from __future__ import annotations

import math
import threading
from typing import Optional

import numpy as np

from .dimension import LevelSetSampler, graph_dim
from .embeddings import build_weierstrass_embedding, search_embedding
from .functions import Perturbation, perturb
from .measures import DiscreteMeasure, decay_exponent, dyadic_bands, energy, sobolev_integral
from .parallel import ordered_map
from .records import Report, Table
from .slicing import slice_row
from .specs import embedding_from_spec, function_from_spec


def sample_probe(t0, rho: float, samples: int, seed: int) -> np.ndarray:
    """``samples`` points uniform in the max-norm ball B(t0, rho); shape (samples, d)."""
    t0 = np.asarray(t0, dtype=float)
    rng = np.random.default_rng(seed)
    return t0 + rng.uniform(-rho, rho, size=(int(samples), t0.size))


class ProbeFamily:
    """Base function, embedding and sampled t; grid values of f_t are base + Phi @ t."""

    def __init__(self, params: dict, embedding=None):
        self.alpha = float(params["alpha"])
        self.f = function_from_spec(params["function"], self.alpha, params["base"])
        self.emb = embedding if embedding is not None else embedding_from_spec(params["embedding"], self.alpha,
                                                                              params["base"])
        if params.get("t") is not None:
            ts = np.atleast_2d(np.asarray(params["t"], dtype=float))
        else:
            t0 = params.get("t0")
            t0 = np.zeros(self.emb.d) if t0 is None else np.asarray(t0, dtype=float)
            ts = sample_probe(t0, params["rho"], params["samples"], params["seed"])
        if ts.shape[1] != self.emb.d:
            raise ValueError(f"t has {ts.shape[1]} coordinates, embedding has d={self.emb.d}")
        self.ts = ts
        self._cache = {}
        self._lock = threading.Lock()

    def _grid(self, num, den):
        key = (num.size, den)
        with self._lock:
            if key not in self._cache:
                self._cache[key] = (np.asarray(self.f.at_rationals(num, den), dtype=float),
                                    np.ascontiguousarray(self.emb.at_rationals(num, den)))
            return self._cache[key]

    def closed(self, t, n: int) -> np.ndarray:
        base, phi = self._grid(np.arange(n + 1, dtype=np.int64), n)
        return base + phi @ t

    def midpoints(self, t, n: int) -> np.ndarray:
        base, phi = self._grid(2 * np.arange(n, dtype=np.int64) + 1, 2 * n)
        return base + phi @ t

    def function(self, t):
        return perturb(self.f, Perturbation(tuple(t), self.emb))

    def sample_alpha(self, t) -> float:
        return self.f.alpha if not np.any(t) else min(self.f.alpha, self.emb.alpha)

    def describe(self, params: dict) -> dict:
        return {"samples": int(self.ts.shape[0]), "rho": params.get("rho"), "t0": params.get("t0"),
                "explicit_t": params.get("t") is not None, "embedding_dim": self.emb.d,
                "function": self.f.description, "embedding": self.emb.description}


# ---------------------------------------------------------------------------
# level sets: upper bound on every level, lower bound on heavy levels


def _levels(vals: np.ndarray, count: int, central: float) -> np.ndarray:
    lo, hi = float(vals.min()), float(vals.max())
    pad = 0.5 * (1.0 - central) * (hi - lo)
    return np.linspace(lo + pad, hi - pad, int(count))


def _level_sweep(family: ProbeFamily, t, params: dict):
    ladder = [int(n) for n in params["ladder"]]
    vals = family.closed(t, ladder[-1])
    sampler = LevelSetSampler(None, ladder, params.get("band_constant"), values=vals, alpha=family.sample_alpha(t))
    ys = _levels(vals, params["levels"], params["central"])
    window = tuple(params["window"]) if params.get("window") is not None else None
    fits = [sampler.fit(y, window) for y in ys]
    return ys, fits, sampler.C, bool(vals.max() == vals.min())


def _check_part1_alpha(params):
    if not params["alpha"] < 0.5:
        raise ValueError("alpha: level-set upper bound runs need alpha < 1/2")


def verify_part1(params: dict, threads: Optional[int] = None, embedding=None) -> Report:
    """Max level-set dimension slope per sample against 1 - alpha + tolerance."""
    _check_part1_alpha(params)
    fam = ProbeFamily(params, embedding)
    alpha, tol = float(params["alpha"]), float(params["tolerance"])
    bound = 1.0 - alpha + tol

    def run(k):
        ys, fits, C, degenerate = _level_sweep(fam, fam.ts[k], params)
        slopes = np.array([f.slope for f in fits])
        defined = ~np.isnan(slopes)
        top = int(np.nanargmax(slopes)) if defined.any() else -1
        return ys, fits, C, degenerate, top

    results = ordered_map(run, range(len(fam.ts)), threads)
    sample_rows, level_rows = [], []
    passes, undefined, total = 0, 0, 0
    best_fit = None
    for k, (ys, fits, C, degenerate, top) in enumerate(results):
        max_slope = fits[top].slope if top >= 0 else math.nan
        ok = top >= 0 and max_slope <= bound
        passes += ok
        n_undef = sum(f.undefined for f in fits)
        undefined += n_undef
        total += len(fits)
        sample_rows.append((k, max_slope, ys[top] if top >= 0 else math.nan, C, n_undef, degenerate, ok))
        level_rows.extend((k, y, f.slope, f.r2, f.undefined) for y, f in zip(ys, fits))
        if k == 0 and top >= 0:
            best_fit = fits[top]
    summary = {"alpha": alpha, "tolerance": tol, "bound": bound, "pass_fraction": passes / len(results),
               "passes": passes, "ladder": params["ladder"], "window": params.get("window"),
               "levels": params["levels"], "undefined_fits": undefined, "total_fits": total,
               **fam.describe(params)}
    report = Report("verify-part1", summary,
                    {"samples": Table(("sample", "max_slope", "argmax_level", "band_constant", "undefined_levels",
                                       "degenerate", "pass"), sample_rows),
                     "levels": Table(("sample", "y", "slope", "r2", "undefined"), level_rows)},
                    undefined_dominated=undefined > total / 2)
    if best_fit is not None:
        report.plots["sample0_max_level"] = best_fit
    return report


def verify_part2(params: dict, threads: Optional[int] = None, embedding=None) -> Report:
    """Mass-weighted fraction of levels with large level-set slope and stable slice energy."""
    fam = ProbeFamily(params, embedding)
    alpha, tol = float(params["alpha"]), float(params["tolerance"])
    s = float(params["s"]) if params.get("s") is not None else 1.0 - alpha - 0.05
    theta = math.pi / 2
    slope_floor = 1.0 - alpha - tol
    stab_tol = float(params["stability_tolerance"])
    n_slice, r = int(params["slice_n"]), float(params["slice_r"])
    x_mid = (np.arange(n_slice) + 0.5) / n_slice

    def run(k):
        t = fam.ts[k]
        ys, fits, C, degenerate = _level_sweep(fam, t, params)
        lift = DiscreteMeasure(np.column_stack([x_mid, fam.midpoints(t, n_slice)]), np.full(n_slice, 1.0 / n_slice))
        rows = [slice_row(lift, theta, y, r, [s]) for y in ys]
        return ys, fits, rows, degenerate

    results = ordered_map(run, range(len(fam.ts)), threads)
    sample_rows, level_rows = [], []
    passes, counted, undefined, total = 0, 0, 0, 0
    threshold = float(params["fraction_threshold"])
    for k, (ys, fits, rows, degenerate) in enumerate(results):
        weights = np.array([row.band_mass for row in rows])
        good = np.array([(not f.undefined) and f.slope >= slope_floor and row.stable(stab_tol)
                         for f, row in zip(fits, rows)])
        frac = float(weights[good].sum() / weights.sum()) if weights.sum() > 0 else 0.0
        ok = frac >= threshold
        if not degenerate:
            counted += 1
            passes += ok
        undefined += sum(f.undefined for f in fits)
        total += len(fits)
        sample_rows.append((k, frac, int(good.sum()), degenerate, ok))
        level_rows.extend((k, y, f.slope, row.band_mass, row.energies[0], row.stability[0], g)
                          for y, f, row, g in zip(ys, fits, rows, good))
    summary = {"alpha": alpha, "tolerance": tol, "slope_floor": slope_floor, "s": s, "slice_r": r,
               "slice_n": n_slice, "stability_tolerance": stab_tol, "fraction_threshold": threshold,
               "pass_fraction": passes / counted if counted else 0.0, "passes": passes,
               "counted_samples": counted, "degenerate_samples": len(results) - counted,
               "ladder": params["ladder"], "window": params.get("window"), "levels": params["levels"],
               "undefined_fits": undefined, "total_fits": total, **fam.describe(params)}
    return Report("verify-part2", summary,
                  {"samples": Table(("sample", "weighted_fraction", "good_levels", "degenerate", "pass"), sample_rows),
                   "levels": Table(("sample", "y", "slope", "band_mass", "slice_energy", "stability_ratio", "good"),
                                   level_rows)},
                  undefined_dominated=undefined > total / 2)


# ---------------------------------------------------------------------------
# Fourier decay and Sobolev integrals of the pushforward


def verify_sobolev(params: dict, threads: Optional[int] = None, embedding=None) -> Report:
    """Per sample: decay exponent of mu_t^{pi/2} against beta + 1 and a bounded Sobolev doubling trace."""
    fam = ProbeFamily(params, embedding)
    beta, n = float(params["beta"]), int(params["n"])
    bands = dyadic_bands(*params["bands"])
    cutoff, doublings = float(params["cutoff"]), int(params["doublings"])
    growth_tol = float(params["growth_tolerance"])
    weights = np.full(n, 1.0 / n)

    def run(k):
        mu = DiscreteMeasure(fam.midpoints(fam.ts[k], n), weights)
        return decay_exponent(mu, bands), sobolev_integral(mu, beta, cutoff, doublings)

    results = ordered_map(run, range(len(fam.ts)), threads)
    rows, passes, flagged = [], 0, 0
    finals = []
    for k, (fit, trace) in enumerate(results):
        ok = fit.eta > beta + 1.0 and not fit.flagged and trace.bounded(growth_tol)
        passes += ok
        flagged += fit.flagged
        finals.append(trace.integrals[-1])
        rows.append((k, fit.eta, fit.r2, fit.flagged, trace.integrals[-1], trace.ratios[-1], ok))
    summary = {"beta": beta, "n": n, "bands": list(bands), "cutoff": cutoff, "doublings": doublings,
               "growth_tolerance": growth_tol, "pass_fraction": passes / len(results), "passes": passes,
               "flagged_fits": flagged, "mean_truncated_integral": float(np.mean(finals)),
               "median_eta": float(np.median([r[1] for r in rows])), **fam.describe(params)}
    report = Report("verify-sobolev", summary,
                    {"samples": Table(("sample", "eta", "r2", "flagged", "truncated_integral", "last_ratio", "pass"),
                                      rows)},
                    undefined_dominated=flagged > len(results) / 2)
    report.plots["sample0_decay"] = results[0][0]
    return report


# ---------------------------------------------------------------------------
# graph energies


def verify_energy_finiteness(params: dict, threads: Optional[int] = None, embedding=None) -> Report:
    """Monte Carlo average of I_{2-beta}(mu_t) at n and n/2 and its ratio."""
    fam = ProbeFamily(params, embedding)
    beta, n = float(params["beta"]), int(params["n"])
    s = 2.0 - beta
    tol = float(params["stability_tolerance"])
    graph_ladder = params.get("graph_ladder")

    def lift(t, m):
        x = (np.arange(m) + 0.5) / m
        return DiscreteMeasure(np.column_stack([x, fam.midpoints(t, m)]), np.full(m, 1.0 / m))

    def run(k):
        t = fam.ts[k]
        fine, coarse = energy(lift(t, n), s, tol), energy(lift(t, n // 2), s, tol)
        gslope = math.nan
        if graph_ladder:
            gslope = graph_dim(fam.function(t), graph_ladder, n=n).slope
        return fine, coarse, gslope

    results = ordered_map(run, range(len(fam.ts)), threads)
    rows = []
    for k, (fine, coarse, g) in enumerate(results):
        rows.append((k, fine.value, coarse.value, fine.convergence_ratio, fine.diverging, fine.coincident, g))
    avg_fine = float(np.mean([r[1] for r in rows]))
    avg_coarse = float(np.mean([r[2] for r in rows]))
    ratio = avg_fine / avg_coarse if avg_coarse > 0 and math.isfinite(avg_coarse) else math.inf
    divergence_flags = sum(1 for r in rows if r[4])
    summary = {"beta": beta, "s": s, "n": n, "average_fine": avg_fine, "average_coarse": avg_coarse,
               "resolution_ratio": ratio, "stability_tolerance": tol, "stable": bool(abs(ratio - 1.0) <= tol),
               "divergence_flags": divergence_flags, "graph_ladder": graph_ladder,
               "median_graph_slope": float(np.nanmedian([r[6] for r in rows])) if graph_ladder else None,
               **fam.describe(params)}
    return Report("verify-energy", summary,
                  {"samples": Table(("sample", "energy_n", "energy_half_n", "subsample_ratio", "diverging",
                                     "coincident", "graph_slope"), rows)})


# ---------------------------------------------------------------------------
# probe spaces built from searched Weierstrass embeddings


def run_conjecture_probe(params: dict, threads: Optional[int] = None) -> Report:
    """Search a Weierstrass embedding, then run both level-set checks in its probe space.

    Results are conditional on the candidate's numerical certificate.
    """
    _check_part1_alpha(params)
    alpha, base = float(params["alpha"]), int(params["base"])
    result = search_embedding(base, alpha, int(params["m"]), int(params["budget"]), int(params["seed"]),
                              cutoff=int(params["cutoff"]), working_n=int(params["working_n"]),
                              grids=params["grids"])
    emb = build_weierstrass_embedding(result.spec)
    p1 = verify_part1(params, threads, emb)
    p2 = verify_part2(params, threads, emb)
    cert = result.certificate
    summary = {"conditional_on_certificate": True, "candidate": result.spec.to_dict(),
               "certificate": cert.to_dict(), "search_trace_final": result.trace[-1],
               "search_trace_initial": result.trace[0], "part1_pass_fraction": p1.summary["pass_fraction"],
               "part2_pass_fraction": p2.summary["pass_fraction"], "samples": p1.summary["samples"],
               "rho": params["rho"], "ladder": params["ladder"]}
    tables = {"search_trace": Table(("iteration", "best_c1"), list(enumerate(result.trace))),
              "certificate_trace": Table(("n", "c1", "c2"),
                                         [(n, c1, c2) for (n, c1), (_, c2) in zip(cert.trace, cert.upper_trace)]),
              "part1_samples": p1.tables["samples"], "part2_samples": p2.tables["samples"]}
    return Report("conjecture-probe", summary, tables,
                  undefined_dominated=p1.undefined_dominated or p2.undefined_dominated)
