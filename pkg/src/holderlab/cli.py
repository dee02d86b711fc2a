"""Command-line front end.

Each subcommand takes its parameters from an optional JSON file
(``--config``), then from ``--set KEY=JSON`` and per-key flags, with the
defaults table in :mod:`holderlab.config` filling the rest. Estimator and
verification subcommands write a report directory under ``--out`` and print
its summary; ``eval``, ``tail-bound`` and ``perturb-eval`` print bare values.

Exit status: 0 on success, 1 when undefined fits dominate a run, 2 on
configuration or domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from typing import Callable, Dict, Optional

import numpy as np

from . import __version__
from .config import COMMANDS, DEFAULTS, ConfigError, RunConfig, parse_config
from .dimension import LevelSetSampler, graph_dim, level_set, pack_count
from .embeddings import certify_biholder, reverse_holder_fraction, search_embedding
from .experiments import (run_conjecture_probe, verify_energy_finiteness, verify_part1, verify_part2,
                          verify_sobolev)
from .functions import Perturbation, estimate_holder_constant, perturb, tail_bound
from .measures import (DiscreteMeasure, decay_exponent, dyadic_bands, energy, lift_measure, point_mass, project,
                       sobolev_integral, uniform_measure)
from .parallel import THREADS_ENV, default_threads
from .records import Report, Table, _plain, write_report
from .slicing import disintegration_defect, slice_levels, slice_report
from .specs import embedding_from_spec, function_from_spec, weierstrass_params

DEFAULT_OUT = "holderlab-runs"

HELP = {
    "eval": "evaluate the base function at x",
    "tail-bound": "truncation error bound of the Weierstrass series",
    "perturb-eval": "evaluate f + <t, Phi> at x",
    "graph-dim": "packing-dimension fit of the graph",
    "level-dim": "packing-dimension fit of one level set",
    "levelset": "grid points of one level band",
    "fourier-decay": "Fourier decay exponent of a measure",
    "sobolev": "Sobolev doubling trace of a measure",
    "energy": "Riesz energy of a measure",
    "slice": "band energies of slices of the graph measure",
    "disintegration-check": "Riemann-sum defect of the slice decomposition",
    "embedding-build": "tabulate a snowflake embedding",
    "embedding-certify": "bi-Hölder certificate of an embedding",
    "embedding-search": "evolution-strategy search for a Weierstrass embedding",
    "reverse-holder": "reverse-Hölder fractions for random points and dyadic intervals",
    "verify-part1": "level-set upper bound over sampled perturbations",
    "verify-part2": "level-set lower bound with slice energies over sampled perturbations",
    "verify-sobolev": "Fourier decay and Sobolev traces over sampled perturbations",
    "verify-energy": "graph energies over sampled perturbations",
    "conjecture-probe": "embedding search followed by both level-set checks",
}


# ---------------------------------------------------------------------------
# shared builders


def _target(p: dict):
    """The base function, perturbed by ``t`` when the config provides one."""
    f = function_from_spec(p["function"], p["alpha"], p["base"])
    if p.get("t") is None:
        return f
    emb = embedding_from_spec(p["embedding"], p["alpha"], p["base"])
    return perturb(f, Perturbation(tuple(p["t"]), emb))


def _measure(p: dict, allowed) -> DiscreteMeasure:
    kind, n = p["measure"], int(p["n"])
    if kind not in allowed:
        raise ConfigError("measure", f"{p['measure']!r} is not available here; use one of {list(allowed)}")
    if kind == "uniform":
        return uniform_measure(n)
    if kind == "atom":
        return point_mass(0.0)
    lift = lift_measure(_target(p), n)
    return lift if kind == "lift" else project(lift, p["theta"])


def _xs(value):
    return np.atleast_1d(np.asarray(value, dtype=float))


def _print_values(values) -> None:
    for v in np.atleast_1d(values).ravel():
        print(repr(float(v)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(p, threads):
    f = function_from_spec(p["function"], p["alpha"], p["base"])
    _print_values(f(_xs(p["x"])))


def cmd_tail_bound(p, threads):
    if p["function"].get("kind") not in ("takagi", "cosine", "weierstrass"):
        raise ConfigError("function", "tail bounds exist only for Weierstrass-type functions")
    print(repr(tail_bound(weierstrass_params(p["function"], p["alpha"], p["base"]))))


def cmd_perturb_eval(p, threads):
    f = function_from_spec(p["function"], p["alpha"], p["base"])
    emb = embedding_from_spec(p["embedding"], p["alpha"], p["base"])
    t = np.zeros(emb.d) if p.get("t") is None else p["t"]
    _print_values(perturb(f, Perturbation(tuple(t), emb))(_xs(p["x"])))


def cmd_graph_dim(p, threads):
    f = _target(p)
    fit = graph_dim(f, p["ladder"], n=p["n"], window=p["window"], substep=p["substep"], threads=threads)
    summary = {**fit.summary(), "function": f.description, "alpha": f.alpha, "n": p["n"],
               "predicted_upper": 2.0 - f.alpha}
    return Report("graph-dim", summary, {"fit": Table(("r", "N", "residual"), fit.to_rows())}, {"fit": fit},
                  undefined_dominated=fit.undefined)


def _default_level(f, n):
    vals = f.on_grid(n)
    return 0.5 * (float(vals.min()) + float(vals.max()))


def cmd_level_dim(p, threads):
    f = _target(p)
    sampler = LevelSetSampler(f, p["ladder"], p["band_constant"])
    y = _default_level(f, p["ladder"][0]) if p["y"] is None else float(p["y"])
    fit = sampler.fit(y, p["window"])
    summary = {**fit.summary(), "y": y, "band_constant": sampler.C, "function": f.description, "alpha": f.alpha,
               "predicted_upper": 1.0 - f.alpha}
    plots = {} if fit.undefined else {"fit": fit}
    return Report("level-dim", summary, {"fit": Table(("r", "N", "residual"), fit.to_rows())}, plots,
                  undefined_dominated=fit.undefined)


def cmd_levelset(p, threads):
    f = _target(p)
    n = int(p["n"])
    y = _default_level(f, n) if p["y"] is None else float(p["y"])
    C = None
    if p["eps"] is None:
        C = estimate_holder_constant(f, min(n, 4096))
        eps = C * n ** (-f.alpha)
    else:
        eps = float(p["eps"])
    A = level_set(f, y, n, eps)
    summary = {"y": y, "n": n, "eps": eps, "band_constant": C, "points": len(A),
               "packing_count": pack_count(A, 1.0 / n) if len(A) else 0, "function": f.description}
    return Report("levelset", summary, {"points": Table(("x",), [(x,) for x in A.points])})


def cmd_fourier_decay(p, threads):
    mu = _measure(p, ("pushforward", "uniform", "atom"))
    fit = decay_exponent(mu, dyadic_bands(*p["bands"]))
    summary = {"eta": fit.eta, "stderr": fit.stderr, "r2": fit.r2, "flagged": fit.flagged, "measure": p["measure"],
               "n": len(mu), "bands": p["bands"]}
    rows = [tuple(r) for r in fit.profile.band_averages]
    plots = {"decay": fit} if np.all(fit.profile.band_averages[:, 1] > 0) else {}
    return Report("fourier-decay", summary, {"bands": Table(("band_centre", "mean_power"), rows)}, plots)


def cmd_sobolev(p, threads):
    mu = _measure(p, ("pushforward", "uniform", "atom"))
    trace = sobolev_integral(mu, p["beta"], p["cutoff"], p["doublings"])
    ratios = np.concatenate([[math.nan], trace.ratios])
    summary = {"beta": p["beta"], "measure": p["measure"], "n": len(mu), "final_integral": trace.integrals[-1],
               "last_ratio": trace.ratios[-1], "bounded": trace.bounded()}
    return Report("sobolev", summary,
                  {"trace": Table(("cutoff", "integral", "ratio"), list(zip(trace.cutoffs, trace.integrals, ratios)))})


def cmd_energy(p, threads):
    mu = _measure(p, ("lift", "pushforward", "uniform"))
    est = energy(mu, p["s"])
    summary = {"s": est.s, "value": est.value, "n": est.n, "convergence_ratio": est.convergence_ratio,
               "diverging": est.diverging, "coincident": est.coincident, "measure": p["measure"]}
    return Report("energy", summary)


def cmd_slice(p, threads):
    mu = lift_measure(_target(p), int(p["n"]))
    s_values = p["s"] if isinstance(p["s"], list) else [p["s"]]
    levels = slice_levels(mu, p["theta"], p["levels"], p["central"])
    rows = slice_report(mu, p["theta"], levels, p["r"], s_values, threads)
    header = ("y", "band_mass", "density") + tuple(f"energy_s{s}" for s in s_values) + \
        tuple(f"stability_s{s}" for s in s_values) + ("stable",)
    table = [(row.y, row.band_mass, row.density, *row.energies, *row.stability, row.stable()) for row in rows]
    summary = {"theta": p["theta"], "r": p["r"], "s": s_values, "levels": len(rows), "n": p["n"],
               "stable_levels": sum(row.stable() for row in rows)}
    return Report("slice", summary, {"slices": Table(header, table)})


def cmd_disintegration_check(p, threads):
    mu = lift_measure(_target(p), int(p["n"]))
    rows = []
    for k in range(int(p["halvings"]) + 1):
        r, delta = p["r"] * 2.0 ** -k, p["delta"] * 2.0 ** -k
        rows.append((r, delta, disintegration_defect(mu, p["theta"], r, delta)))
    defects = [row[2] for row in rows]
    summary = {"theta": p["theta"], "n": p["n"], "defects": defects,
               "improvement": defects[0] / defects[-1] if defects[-1] > 0 else math.inf}
    return Report("disintegration-check", summary, {"defects": Table(("r", "delta", "defect"), rows)})


def cmd_embedding_build(p, threads):
    emb = embedding_from_spec(p["embedding"], p["alpha"], p["base"])
    n = int(p["n"])
    vals = emb.at_rationals(np.arange(n + 1), n)
    rows = [(i / n, *vals[i]) for i in range(n + 1)]
    summary = {"d": emb.d, "alpha": emb.alpha, "description": emb.description, "periodic": emb.periodic,
               "c2_bound": emb.c2_bound, "n": n}
    return Report("embedding-build", summary,
                  {"values": Table(("x",) + tuple(f"phi{j}" for j in range(emb.d)), rows)})


def cmd_embedding_certify(p, threads):
    emb = embedding_from_spec(p["embedding"], p["alpha"], p["base"])
    cert = certify_biholder(emb, p["alpha"], p["grids"], seed=p["seed"])
    rows = [(n, c1, c2) for (n, c1), (_, c2) in zip(cert.trace, cert.upper_trace)]
    summary = {**cert.to_dict(), "d": emb.d, "description": emb.description, "c2_bound": emb.c2_bound}
    return Report("embedding-certify", summary, {"trace": Table(("n", "c1", "c2"), rows)})


def cmd_embedding_search(p, threads):
    result = search_embedding(p["base"], p["alpha"], p["m"], p["budget"], p["seed"], cutoff=p["cutoff"],
                              working_n=p["working_n"], grids=p["grids"])
    cert = result.certificate
    summary = {"candidate": result.spec.to_dict(), "certificate": cert.to_dict(),
               "initial_c1": result.trace[0], "final_c1": result.trace[-1], "evidence_only": True}
    return Report("embedding-search", summary,
                  {"search_trace": Table(("iteration", "best_c1"), list(enumerate(result.trace))),
                   "certificate_trace": Table(("n", "c1", "c2"),
                                              [(n, a, b) for (n, a), (_, b) in zip(cert.trace, cert.upper_trace)])})


def cmd_reverse_holder(p, threads):
    W = _target(p)
    alpha, eps, n = float(p["alpha"]), float(p["eps"]), int(p["n"])
    if p["x"] is not None or p["interval"] is not None:
        interval = (0.0, 1.0) if p["interval"] is None else tuple(p["interval"])
        x = 0.5 * (interval[0] + interval[1]) if p["x"] is None else float(p["x"])
        cases = [(x, interval)]
    else:
        rng = np.random.default_rng(p["seed"])
        cases = []
        for _ in range(int(p["pairs"])):
            k = int(rng.integers(0, 7))
            j = int(rng.integers(0, 2 ** k))
            lo, hi = j / 2 ** k, (j + 1) / 2 ** k
            cases.append((float(rng.uniform(lo, hi)), (lo, hi)))
    rows = [(x, lo, hi, reverse_holder_fraction(W, alpha, eps, x, (lo, hi), n)) for x, (lo, hi) in cases]
    fractions = [r[3] for r in rows]
    summary = {"eps": eps, "alpha": alpha, "pairs": len(rows), "min_fraction": min(fractions),
               "mean_fraction": float(np.mean(fractions)), "function": W.description}
    return Report("reverse-holder", summary, {"fractions": Table(("x", "lo", "hi", "fraction"), rows)})


OPERATIONS: Dict[str, Callable] = {
    "eval": cmd_eval,
    "tail-bound": cmd_tail_bound,
    "perturb-eval": cmd_perturb_eval,
    "graph-dim": cmd_graph_dim,
    "level-dim": cmd_level_dim,
    "levelset": cmd_levelset,
    "fourier-decay": cmd_fourier_decay,
    "sobolev": cmd_sobolev,
    "energy": cmd_energy,
    "slice": cmd_slice,
    "disintegration-check": cmd_disintegration_check,
    "embedding-build": cmd_embedding_build,
    "embedding-certify": cmd_embedding_certify,
    "embedding-search": cmd_embedding_search,
    "reverse-holder": cmd_reverse_holder,
    "verify-part1": lambda p, threads: verify_part1(p, threads),
    "verify-part2": lambda p, threads: verify_part2(p, threads),
    "verify-sobolev": lambda p, threads: verify_sobolev(p, threads),
    "verify-energy": lambda p, threads: verify_energy_finiteness(p, threads),
    "conjecture-probe": lambda p, threads: run_conjecture_probe(p, threads),
}


# ---------------------------------------------------------------------------
# argument parsing


def _json_value(text: str):
    """Parse a flag value as JSON, falling back to the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


_UNSET = object()


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holderlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"holderlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--config", metavar="PATH", help="JSON configuration file")
        sp.add_argument("--out", metavar="DIR", default=DEFAULT_OUT, help=f"report root (default {DEFAULT_OUT})")
        sp.add_argument("--threads", type=int, default=None, metavar="N",
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=JSON", dest="assignments",
                        help="override any configuration key")
        group = sp.add_argument_group("configuration keys (values are JSON)")
        for key, value in DEFAULTS[name].items():
            group.add_argument(_flag(key), dest=f"key_{key}", type=_json_value, default=_UNSET, metavar="VALUE",
                               help=f"default {json.dumps(_plain(value))}")
    return parser


def _overrides(args) -> dict:
    out = {}
    for item in args.assignments:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(key, "expected KEY=JSON")
        out[key.strip()] = _json_value(value)
    for key in DEFAULTS[args.command]:
        value = getattr(args, f"key_{key}")
        if value is not _UNSET:
            out[key] = value
    return out


def dispatch(config: RunConfig, out: str = DEFAULT_OUT, threads: Optional[int] = None) -> int:
    """Run the configured operation; write and print its report. Returns the exit status."""
    report = OPERATIONS[config.command](config.params, threads if threads is not None else default_threads())
    if report is None:
        return 0
    os.makedirs(out, exist_ok=True)
    path = write_report(report, config.document(), out, __version__)
    with open(os.path.join(path, "summary.json")) as fh:
        sys.stdout.write(fh.read())
    print(f"report: {path}", file=sys.stderr)
    return report.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        config = parse_config(args.config, _overrides(args), args.command)
        status = dispatch(config, args.out, args.threads)
    except ValueError as exc:  # ConfigError included; domain errors name their key
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wall-clock: {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
