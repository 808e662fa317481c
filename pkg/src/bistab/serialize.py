"""CSV and JSON emission of root sets, sweeps, traces and trajectories.

Floats are written with 17 significant digits so a file reloads to the
same doubles.  Output is a pure function of the data: no timestamps,
sorted JSON keys, fixed column order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .roots import RootSet
from .sweep import HysteresisTrace, SweepResult

COLUMNS = ("axis", "n_p1", "n_p2", "x1s", "x2s", "stability", "branch_label", "residual")
TRAJECTORY_COLUMNS = ("t", "p_pu", "u1", "v1", "u2", "v2", "x1", "w1", "x2", "w2", "n_p1", "n_p2")
FORMATS = ("csv", "json")


def fmt(x) -> str:
    """17-significant-digit text for a float; empty for None."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _row(axis, sol, label) -> tuple:
    return (axis, sol.n[0], sol.n[1], sol.x[0], sol.x[1], sol.stability.value, label, sol.residual_norm)


def rootset_rows(rs: RootSet, axis: float | None = None, labels=None) -> list[tuple]:
    labels = list(range(len(rs))) if labels is None else labels
    return [_row(axis, s, lab) for s, lab in zip(rs, labels)]


def sweep_rows(result: SweepResult) -> list[tuple]:
    rows = []
    for v, rs, labs in zip(result.values, result.roots, result.branch_labels):
        rows.extend(rootset_rows(rs, float(v), labs))
    return rows


def trace_rows(trace: HysteresisTrace) -> list[tuple]:
    return [_row(float(v), s, lab) for v, s, lab in zip(trace.values, trace.occupied, trace.labels)]


def trajectory_rows(times, powers, states) -> list[tuple]:
    s = np.asarray(states, dtype=float)
    n1 = s[:, 0] ** 2 + s[:, 1] ** 2
    n2 = s[:, 2] ** 2 + s[:, 3] ** 2
    # internal state order is (u1, v1, u2, v2, X1, V1, X2, V2)
    return [
        (t, p, *row[:4], row[4], row[5], row[6], row[7], a, b)
        for t, p, row, a, b in zip(times, powers, s, n1, n2)
    ]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def to_csv(rows, columns=COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError("non-finite value in output")
        return v
    return v


def to_json(rows, columns=COLUMNS, meta: dict | None = None) -> str:
    doc = {
        "columns": list(columns),
        "rows": [[_json_value(v) for v in r] for r in rows],
        "meta": meta or {},
    }
    # float repr is the shortest string that round-trips
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def render(rows, fmt_name: str, columns=COLUMNS, meta: dict | None = None) -> str:
    if fmt_name == "csv":
        return to_csv(rows, columns)
    if fmt_name == "json":
        return to_json(rows, columns, meta)
    raise ValueError(f"unknown format {fmt_name!r}")


def write(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
