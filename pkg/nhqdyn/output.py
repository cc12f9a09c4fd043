"""
Trace CSV and report JSON writers plus the response envelopes
"""
import json
import logging
import threading
from pathlib import Path

import numpy as np

# 17 significant digits round-trip every double
CSV_FORMAT = "%.17g"

logger = logging.getLogger(__name__)

_write_lock = threading.Lock()


def error_response(message, error_type="error", **kwargs):
    """Generate consistent error envelope"""
    return {
        "success": False,
        "error": {
            "type": error_type,
            "message": message,
            **kwargs
        }
    }


def success_response(data):
    """Generate consistent success envelope"""
    return {
        "success": True,
        "data": data
    }


def error_from_exception(exc):
    """Envelope for an NhqdynError, carrying its payload fields"""
    return error_response(str(exc), exc.error_type, **exc.payload())


def to_json(data):
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False, default=_jsonable)


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


def write_json(path, data):
    """Write sorted, indented JSON with a trailing newline"""
    path = Path(path)
    text = to_json(data) + "\n"
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_trace_csv(path, times, columns):
    """
    Write a trace file: header row, then t and one column per series

    Args:
        path: Output file path
        times: Monotone time grid
        columns: Ordered mapping of column name to series
    """
    path = Path(path)
    names = ["t", *columns.keys()]
    table = np.column_stack([np.asarray(times, dtype=float)]
                            + [np.asarray(v, dtype=float) for v in columns.values()])
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, table, fmt=CSV_FORMAT, delimiter=",", header=",".join(names), comments="")
    logger.info(f"Wrote {path}")
    return path


def read_trace_csv(path):
    """Column name -> float array, for trace files written above"""
    with open(path, encoding="utf-8") as handle:
        names = handle.readline().strip().split(",")
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: values[:, i] for i, name in enumerate(names)}
