"""Deterministic CSV/JSON tables."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v:.12g}"


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else float(format_value(v))
    return v


def to_json(columns, rows, extra=None) -> str:
    doc = {"columns": list(columns), "rows": [{c: _jsonable(r[c]) for c in columns} for r in rows]}
    if extra:
        doc.update(_jsonable(extra))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
