"""JSON matrix and vector files.

Format: ``{"dim": n, "entries": [[e_11, ..., e_1n], ...]}`` row-major, each
entry either a plain number or a ``[re, im]`` pair.  Vectors use the same
object with a flat ``entries`` list.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InputParseError


def _entry(x, where):
    if isinstance(x, bool):
        raise InputParseError(f"{where}: booleans are not numbers")
    if isinstance(x, (int, float)):
        val = complex(float(x), 0.0)
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        val = complex(float(x[0]), float(x[1]))
    else:
        raise InputParseError(f"{where}: expected a number or [re, im], got {x!r}")
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise InputParseError(f"{where}: non-finite entry")
    return val


def _maybe_real(arr):
    if np.all(arr.imag == 0):
        return arr.real.copy()
    return arr


def _header(obj):
    if not isinstance(obj, dict) or "entries" not in obj:
        raise InputParseError("expected an object with 'dim' and 'entries'")
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InputParseError(f"'dim' must be a positive integer, got {dim!r}")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != dim:
        raise InputParseError(f"'entries' must have {dim} rows")
    return dim, entries


def matrix_from_obj(obj) -> np.ndarray:
    dim, rows = _header(obj)
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise InputParseError(f"row {i} must have {dim} entries")
        for j, x in enumerate(row):
            out[i, j] = _entry(x, f"entry ({i}, {j})")
    return _maybe_real(out)


def vector_from_obj(obj) -> np.ndarray:
    dim, entries = _header(obj)
    out = np.array([_entry(x, f"entry {i}") for i, x in enumerate(entries)], dtype=complex)
    return _maybe_real(out)


def _encode(x):
    x = complex(x)
    if x.imag == 0:
        return float(x.real)
    return [float(x.real), float(x.imag)]


def matrix_to_obj(a) -> dict:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return {"dim": int(a.shape[0]), "entries": [[_encode(x) for x in row] for row in a]}


def vector_to_obj(v) -> dict:
    v = np.asarray(v).reshape(-1)
    return {"dim": int(v.shape[0]), "entries": [_encode(x) for x in v]}


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputParseError(f"{path}: invalid JSON ({exc})") from exc


def load_matrix(path) -> np.ndarray:
    return matrix_from_obj(_load(path))


def load_vector(path) -> np.ndarray:
    return vector_from_obj(_load(path))


def save_matrix(path, a) -> None:
    Path(path).write_text(json.dumps(matrix_to_obj(a)))
