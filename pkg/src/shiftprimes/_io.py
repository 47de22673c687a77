"""Serialisation helpers shared by the experiment modules and the CLI."""
import csv
import io
import json
import math
from fractions import Fraction

import numpy as np


def fmt_number(v):
    """CSV cell text: floats with 17 significant digits, exact values as-is."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return format(float(v), ".17g")
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if not math.isfinite(v) else format(v, ".17g")
    return str(v)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj


def to_json(obj, indent=2):
    return json.dumps(jsonable(obj), indent=indent, sort_keys=False)


def csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        cells = [row.get(c) for c in columns] if isinstance(row, dict) else row
        w.writerow([fmt_number(v) for v in cells])
    return buf.getvalue()
