"""Deterministic CSV / JSON report writers.

Floats are written with 17 significant digits and non-finite values as the
strings ``inf``, ``-inf`` and ``nan`` in both formats, so two runs with the
same inputs produce byte-identical files.
"""

import csv
import io
import json
import math
import os

import numpy as np

from . import __version__

LN2 = math.log(2.0)


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if v is None:
        return ""
    return str(v)


def jsonable(obj):
    """Recursively replace non-finite floats by strings and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_float(x)
    return obj


def dumps_json(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dumps_csv(columns, rows, preamble=None):
    """CSV text with an optional ``# key=value`` preamble."""
    buf = io.StringIO()
    for key, value in (preamble or {}).items():
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def preamble(command, config, seed):
    return {
        "artifact": f"qxent {__version__}",
        "command": command,
        "seed": seed,
        "config": json.dumps(jsonable(config), sort_keys=True, separators=(",", ":")),
    }


def write_text(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def to_bits(x, bits):
    return x / LN2 if bits else x
