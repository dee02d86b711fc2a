"""Run configuration: one JSON document per run, validated against per-command defaults."""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .records import canonical_json


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _pow2(lo, hi):
    return [2 ** k for k in range(lo, hi + 1)]


LACUNARY_20 = {"kind": "lacunary", "lambda": 4, "delta": 2.0 ** -20}

COMMON = {"seed": 0, "alpha": 0.4, "base": 2, "function": {"kind": "takagi"}}
TARGET = {"embedding": LACUNARY_20, "t": None}
PROBE = {"embedding": LACUNARY_20, "t0": None, "rho": 1.0, "samples": 32, "t": None}
LEVELS = {"ladder": _pow2(8, 20), "window": [4, 13], "levels": 128, "central": 0.8, "tolerance": 0.1,
          "band_constant": None}
SLICES = {"s": None, "stability_tolerance": 0.2, "slice_n": 2 ** 16, "slice_r": 2.0 ** -6, "fraction_threshold": 0.5}
SEARCH = {"m": 4, "budget": 200, "cutoff": 8, "working_n": 2 ** 10, "grids": _pow2(8, 14)[::2]}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "eval": {**COMMON, "x": 0.5},
    "tail-bound": {**COMMON},
    "perturb-eval": {**COMMON, **TARGET, "x": 0.5},
    "graph-dim": {**COMMON, **TARGET, "ladder": _pow2(6, 14), "n": 2 ** 20, "window": None, "substep": 0.25},
    "level-dim": {**COMMON, **TARGET, "y": None, "ladder": _pow2(8, 16), "window": None, "band_constant": None},
    "levelset": {**COMMON, **TARGET, "y": None, "n": 2 ** 12, "eps": None},
    "fourier-decay": {**COMMON, **TARGET, "measure": "pushforward", "n": 2 ** 16, "bands": [1, 7],
                      "theta": math.pi / 2},
    "sobolev": {**COMMON, **TARGET, "measure": "pushforward", "n": 2 ** 16, "beta": 1.1, "cutoff": 4.0,
                "doublings": 5, "theta": math.pi / 2},
    "energy": {**COMMON, **TARGET, "measure": "lift", "n": 2 ** 12, "s": 0.5, "theta": math.pi / 2},
    "slice": {**COMMON, **TARGET, "theta": math.pi / 2, "r": 2.0 ** -6, "levels": 128, "central": 0.8,
              "s": [0.5], "n": 2 ** 16},
    "disintegration-check": {**COMMON, **TARGET, "theta": math.pi / 2, "r": 2.0 ** -8, "delta": 2.0 ** -8,
                             "n": 2 ** 12, "halvings": 1},
    "embedding-build": {"seed": 0, "alpha": 0.4, "base": 2, "embedding": {"kind": "lacunary", "lambda": 4,
                                                                          "delta": 2.0 ** -12}, "n": 2 ** 8},
    "embedding-certify": {"seed": 0, "alpha": 0.4, "base": 2,
                          "embedding": {"kind": "lacunary", "lambda": 4, "delta": 2.0 ** -16},
                          "grids": [2 ** 12, 2 ** 14, 2 ** 16]},
    "embedding-search": {"seed": 0, "alpha": 0.7, "base": 2, **SEARCH},
    "reverse-holder": {**COMMON, "eps": 0.05, "x": None, "interval": None, "pairs": 64, "n": 4096},
    "verify-part1": {**COMMON, **PROBE, **LEVELS},
    "verify-part2": {**COMMON, **PROBE, **LEVELS, **SLICES},
    "verify-sobolev": {**COMMON, **PROBE, "beta": 1.1, "n": 2 ** 20, "bands": [1, 7], "cutoff": 4.0,
                       "doublings": 5, "growth_tolerance": 0.1},
    "verify-energy": {**COMMON, **PROBE, "alpha": 0.5, "embedding": {"kind": "lacunary", "lambda": 4,
                                                                      "delta": 2.0 ** -14},
                      "samples": 16, "beta": 0.25, "n": 2 ** 14, "stability_tolerance": 0.15,
                      "graph_ladder": _pow2(4, 10)},
    "conjecture-probe": {**COMMON, **PROBE, **LEVELS, **SLICES, **SEARCH, "samples": 8, "slice_n": 2 ** 14},
}

COMMANDS = tuple(DEFAULTS)
MEASURE_KINDS = ("pushforward", "lift", "uniform", "atom")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Dict[str, Any]

    def document(self) -> dict:
        return {"command": self.command, **copy.deepcopy(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.document(), sort_keys=True, indent=2) + "\n"

    def __eq__(self, other):
        return isinstance(other, RunConfig) and canonical_json(self.document()) == canonical_json(other.document())


# ---------------------------------------------------------------------------
# validation


def _number(key, value, lo=None, hi=None, lo_open=False, hi_open=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    if lo is not None and (value <= lo if lo_open else value < lo):
        raise ConfigError(key, f"must be {'>' if lo_open else '>='} {lo}, got {value!r}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        raise ConfigError(key, f"must be {'<' if hi_open else '<='} {hi}, got {value!r}")
    return int(value) if integer else value


def _int_list(key, value, min_len=1, ascending=True):
    if not isinstance(value, list) or len(value) < min_len:
        raise ConfigError(key, f"expected a list of at least {min_len} integers")
    out = [_number(key, v, lo=1, integer=True) for v in value]
    if ascending and any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(key, "must be strictly ascending")
    return out


def _check_dict_kind(key, value, kinds):
    if not isinstance(value, dict) or value.get("kind") not in kinds:
        raise ConfigError(key, f"expected an object with kind in {list(kinds)}")


def _validate(command: str, p: dict) -> None:
    from .specs import EMBEDDING_KINDS, FUNCTION_KINDS

    _number("seed", p["seed"], lo=0, integer=True)
    _number("alpha", p["alpha"], lo=0, hi=1, lo_open=True, hi_open=True)
    _number("base", p["base"], lo=2, integer=True)
    if "function" in p:
        _check_dict_kind("function", p["function"], FUNCTION_KINDS)
    if "embedding" in p:
        _check_dict_kind("embedding", p["embedding"], EMBEDDING_KINDS)
    for key in ("rho",):
        if key in p:
            _number(key, p[key], lo=0, lo_open=True)
    for key in ("samples", "n", "levels", "slice_n", "working_n", "budget", "m", "cutoff", "pairs", "halvings",
                "doublings"):
        if key in p:
            _number(key, p[key], lo=1, integer=True)
    for key in ("ladder", "grids", "graph_ladder"):
        if key in p and p[key] is not None:
            _int_list(key, p[key], 4 if key == "ladder" else 1)
    for key in ("r", "delta", "slice_r", "substep", "eps_", "cutoff"):
        if key in p and p[key] is not None:
            _number(key, p[key], lo=0, lo_open=True)
    for key in ("tolerance", "stability_tolerance", "growth_tolerance", "fraction_threshold"):
        if key in p:
            _number(key, p[key], lo=0)
    if "central" in p:
        _number("central", p["central"], lo=0, hi=1, lo_open=True)
    if "beta" in p:
        _number("beta", p["beta"], lo=0, lo_open=True)
    if p.get("window") is not None:
        w = p["window"]
        if not (isinstance(w, list) and len(w) == 2):
            raise ConfigError("window", "expected [start, stop]")
        lo, hi = (_number("window", v, lo=0, integer=True) for v in w)
        if hi - lo < 4:
            raise ConfigError("window", "must cover at least 4 ladder entries")
        if "ladder" in p and hi > len(p["ladder"]):
            raise ConfigError("window", "extends past the ladder")
    if p.get("bands") is not None:
        b = p["bands"]
        if not (isinstance(b, list) and len(b) == 2 and all(isinstance(v, int) for v in b) and b[1] - b[0] >= 4):
            raise ConfigError("bands", "expected [lo_exp, hi_exp] spanning at least 4 dyadic bands")
    if "measure" in p and p["measure"] not in MEASURE_KINDS:
        raise ConfigError("measure", f"expected one of {list(MEASURE_KINDS)}")
    if "theta" in p:
        _number("theta", p["theta"], lo=0, hi=math.pi, lo_open=True, hi_open=True)
    if "s" in p and p["s"] is not None:
        values = p["s"] if isinstance(p["s"], list) else [p["s"]]
        for v in values:
            _number("s", v, lo=0, lo_open=True)
    if "eps" in p and p["eps"] is not None:
        _number("eps", p["eps"], lo=0)
    if p.get("x") is not None:
        xs = p["x"] if isinstance(p["x"], list) else [p["x"]]
        for v in xs:
            _number("x", v, lo=0, hi=1)
    if p.get("interval") is not None:
        iv = p["interval"]
        if not (isinstance(iv, list) and len(iv) == 2):
            raise ConfigError("interval", "expected [lo, hi]")
        lo, hi = (_number("interval", v, lo=0, hi=1) for v in iv)
        if hi <= lo:
            raise ConfigError("interval", "must be nonempty")
    for key in ("t", "t0"):
        if p.get(key) is not None and not isinstance(p[key], list):
            raise ConfigError(key, "expected a list")


def build_config(doc: dict, command: Optional[str] = None) -> RunConfig:
    """Fill defaults for the document's command and validate every key."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    doc = copy.deepcopy(doc)
    cmd = doc.pop("command", None)
    if command is not None:
        if cmd is not None and cmd != command:
            raise ConfigError("command", f"file is for {cmd!r}, not {command!r}")
        cmd = command
    if cmd is None:
        raise ConfigError("command", "missing")
    if cmd not in DEFAULTS:
        raise ConfigError("command", f"unknown command {cmd!r}")
    defaults = DEFAULTS[cmd]
    for key in doc:
        if key not in defaults:
            raise ConfigError(key, f"unknown key for {cmd}")
    params = copy.deepcopy(defaults)
    params.update(doc)
    _validate(cmd, params)
    return RunConfig(cmd, params)


def parse_config(path: Optional[str] = None, overrides: Optional[dict] = None,
                 command: Optional[str] = None) -> RunConfig:
    """Read a JSON configuration file (optional), apply overrides, fill defaults."""
    doc: dict = {}
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError("config", f"file not found: {path}")
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"malformed JSON in {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
    doc = {**doc, **(overrides or {})}
    return build_config(doc, command)
