"""Run reports: JSON summaries and CSV tables in content-addressed directories."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np


def _plain(value):
    """Convert numpy scalars/arrays and tuples into JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


def canonical_json(doc: Any) -> str:
    return json.dumps(_plain(doc), sort_keys=True, separators=(",", ":"))


def config_hash(doc: Any) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()[:16]


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([_cell(v) for v in row])


@dataclass
class Table:
    header: Tuple[str, ...]
    rows: List[tuple] = field(default_factory=list)


@dataclass
class Report:
    """Outcome of one subcommand: summary values, tables and plottable fits."""

    command: str
    summary: Dict[str, Any]
    tables: Dict[str, Table] = field(default_factory=dict)
    plots: Dict[str, Any] = field(default_factory=dict)
    undefined_dominated: bool = False

    @property
    def exit_code(self) -> int:
        return 1 if self.undefined_dominated else 0


def write_report(report: Report, config_doc: dict, out_root, version: str) -> str:
    """Write summary.json, config.json, one CSV per table and one SVG per plot.

    The directory name is the hash of the canonical config document, so an
    identical configuration always lands in (and overwrites) the same place.
    """
    from .plotting import emit_plot

    path = os.path.join(str(out_root), f"{report.command}-{config_hash(config_doc)}")
    os.makedirs(path, exist_ok=True)
    summary = {"command": report.command, "version": version, "seed": config_doc.get("seed"),
               "summary": report.summary, "tables": sorted(report.tables), "plots": sorted(report.plots)}
    with open(os.path.join(path, "summary.json"), "w") as fh:
        fh.write(json.dumps(_plain(summary), sort_keys=True, indent=2) + "\n")
    with open(os.path.join(path, "config.json"), "w") as fh:
        fh.write(json.dumps(_plain(config_doc), sort_keys=True, indent=2) + "\n")
    for name, table in sorted(report.tables.items()):
        write_csv(os.path.join(path, f"{name}.csv"), table.header, table.rows)
    for name, obj in sorted(report.plots.items()):
        emit_plot(obj, os.path.join(path, f"{name}.svg"))
    return path
