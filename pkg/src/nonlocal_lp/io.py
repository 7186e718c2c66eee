"""File formats: grid functions, deterministic JSON and CSV.

A grid function ``name`` is stored as ``name.json``, a header
``{d, n, box, dtype: "f64", order: "row-major", payload}``, and
``name.bin``, the samples as raw little-endian 8-byte floats.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .fieldops import GridFunction, GridSpec


def _plain(obj):
    """Convert numpy containers and scalars to built-in types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    return json.dumps(obj)


def dumps(obj, indent=2):
    """JSON text with floats written as ``%.17g`` (byte-stable across runs)."""
    return _emit(_plain(obj), indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def write_grid(path, u):
    """Write ``u`` as ``<path>.json`` + ``<path>.bin``; returns the header path."""
    base = Path(path)
    if base.suffix in (".json", ".bin"):
        base = base.with_suffix("")
    payload = base.with_suffix(".bin")
    g = u.grid
    header = {"d": g.d, "n": g.n, "box": g.box, "dtype": "f64", "order": "row-major",
              "payload": payload.name}
    payload.write_bytes(np.ascontiguousarray(u.values, dtype="<f8").tobytes())
    head = base.with_suffix(".json")
    write_json(head, header)
    return head


def read_grid(path):
    """Read a grid function written by :func:`write_grid`.

    Raises
    ------
    ValueError
        On a malformed header or a payload of the wrong size.
    """
    head = Path(path)
    if head.suffix != ".json":
        head = head.with_suffix(".json")
    h = read_json(head)
    for key in ("d", "n", "box", "dtype", "order"):
        if key not in h:
            raise ValueError(f"grid header missing '{key}'")
    if h["dtype"] != "f64" or h["order"] != "row-major":
        raise ValueError("only f64 row-major grid files are supported")
    grid = GridSpec(int(h["d"]), int(h["n"]), float(h["box"]))
    payload = head.parent / h.get("payload", head.with_suffix(".bin").name)
    data = np.frombuffer(payload.read_bytes(), dtype="<f8")
    if data.size != grid.n ** grid.d:
        raise ValueError(f"payload holds {data.size} values, expected {grid.n ** grid.d}")
    return GridFunction(grid, data.reshape(grid.shape))


def write_csv(path, header, rows, comment=None):
    """CSV with an optional leading ``# comment`` line describing the columns."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_float(v) if isinstance(v, float) else v for v in _plain(row)])
