"""JSON measure files and JSON/CSV report output.

Measure files look like::

    {"v": 1, "dim": 2, "points": [[1.0, 0.0], ...], "weights": [...], "f": [...]}

``f`` may be omitted.  Floats are written with ``repr`` precision, so a
save/load cycle reproduces every value exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import MeasureError, SchemaError
from .measures import UNIT_TOL, DiscreteMeasure, WeightFn
from .reports import InequalityReport

SCHEMA_VERSION = 1
REPORT_FIELDS = ("name", "lhs", "rhs", "gap", "equality", "eq_tol")


def measure_to_dict(m: DiscreteMeasure, f=None) -> dict:
    d = {
        "v": SCHEMA_VERSION,
        "dim": m.dim,
        "points": m.points.tolist(),
        "weights": m.weights.tolist(),
    }
    if f is not None:
        d["f"] = np.asarray(getattr(f, "values", f), dtype=float).tolist()
    return d


def save_measure(path, m: DiscreteMeasure, f=None) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(m, f), indent=1) + "\n", encoding="utf-8")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {type(value).__name__}")
    x = float(value)
    if not math.isfinite(x):
        raise SchemaError(f"{where}: value is not finite")
    return x


def _vector(values, length: int | None, where: str) -> list[float]:
    if not isinstance(values, list):
        raise SchemaError(f"{where}: expected a list")
    if length is not None and len(values) != length:
        raise SchemaError(f"{where}: expected {length} entries, got {len(values)}")
    return [_number(x, f"{where}[{i}]") for i, x in enumerate(values)]


def measure_from_dict(d) -> tuple[DiscreteMeasure, WeightFn | None]:
    if not isinstance(d, dict):
        raise SchemaError("top level: expected a JSON object")
    for key in ("v", "dim", "points", "weights"):
        if key not in d:
            raise SchemaError(f"{key}: missing field")
    if d["v"] != SCHEMA_VERSION:
        raise SchemaError(f"v: unsupported schema version {d['v']!r}")
    dim = d["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise SchemaError(f"dim: expected an integer >= 2, got {dim!r}")
    if not isinstance(d["points"], list) or not d["points"]:
        raise SchemaError("points: expected a non-empty list")
    pts = [_vector(p, dim, f"points[{i}]") for i, p in enumerate(d["points"])]
    for i, p in enumerate(pts):
        norm = math.sqrt(sum(x * x for x in p))
        if abs(norm - 1.0) > UNIT_TOL:
            raise SchemaError(f"points[{i}]: unit norm violated (norm {norm!r})")
    w = _vector(d["weights"], len(pts), "weights")
    for i, x in enumerate(w):
        if not x > 0:
            raise SchemaError(f"weights[{i}]: weight must be positive, got {x!r}")
    fv = None
    if d.get("f") is not None:
        fv = _vector(d["f"], len(pts), "f")
        for i, x in enumerate(fv):
            if not x > 0:
                raise SchemaError(f"f[{i}]: value must be positive, got {x!r}")
    try:
        m = DiscreteMeasure(np.array(pts), np.array(w))
    except MeasureError as exc:
        raise SchemaError(f"points: {exc}") from exc
    return m, (None if fv is None else WeightFn(np.array(fv)))


def load_measure(path) -> tuple[DiscreteMeasure, WeightFn | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return measure_from_dict(d)


def _plain(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def report_to_dict(r: InequalityReport) -> dict:
    d = r.to_dict()
    d["meta"] = {k: _plain(v) for k, v in d["meta"].items()}
    return d


def reports_to_json(reports: Iterable[InequalityReport], **extra) -> str:
    body = {**extra, "reports": [report_to_dict(r) for r in reports]}
    return json.dumps(body, indent=1, default=_plain) + "\n"


def reports_to_csv(reports: Iterable[InequalityReport]) -> str:
    """One row per report; meta keys become ``meta.<key>`` columns."""
    rows = [report_to_dict(r) for r in reports]
    meta_keys = sorted({k for r in rows for k in r["meta"]})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*REPORT_FIELDS, *(f"meta.{k}" for k in meta_keys)])
    for r in rows:
        writer.writerow(
            [*(repr(r[k]) if isinstance(r[k], float) else r[k] for k in REPORT_FIELDS),
             *(r["meta"].get(k, "") for k in meta_keys)]
        )
    return buf.getvalue()


def save_report(path, reports: Iterable[InequalityReport], fmt: str = "json", **extra) -> None:
    reports = list(reports)
    if fmt == "json":
        text = reports_to_json(reports, **extra)
    elif fmt == "csv":
        text = reports_to_csv(reports)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")
