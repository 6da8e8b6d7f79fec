"""JSON run reports and flat CSV extracts.

Floats are written with 10 significant digits; infinities and NaN, which
JSON cannot carry, become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
Reports are dumped with sorted keys, so parsing and re-dumping a report
reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from importlib import resources

import numpy as np

from . import __version__

SIGNIFICANT_DIGITS = 10


def _float(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.{SIGNIFICANT_DIGITS}g}")


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, enums and floats for JSON."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    return obj


def format_number(v) -> str:
    v = _float(float(v))
    return v if isinstance(v, str) else repr(v)


def run_report(command: str, argv, seeds: dict, dataset: dict | None, payload: dict) -> dict:
    return jsonable(
        {
            "tool": "mifs",
            "version": __version__,
            "command": command,
            "argv": list(argv),
            "seeds": seeds,
            "dataset": dataset,
            "payload": payload,
        }
    )


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def dataset_summary(d, target_name: str, standardized: bool) -> dict:
    return {
        "n_samples": d.n_samples,
        "n_features": d.n_features,
        "feature_names": list(d.feature_names),
        "target": target_name,
        "standardized": standardized,
    }


def load_schema() -> dict:
    return json.loads(resources.files("mifs").joinpath("report.schema.json").read_text())


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
