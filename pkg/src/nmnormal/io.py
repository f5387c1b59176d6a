"""JSON encoding shared by the CLI and the search witnesses.

A matrix file is ``{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}``
with row-major entries.  Reports are written with every float at 17
significant digits, so equal inputs give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError


def _reject_constant(token: str):
    raise InvalidInputError(f"non-finite number {token!r} is not allowed")


def loads(text: str, what: str = "input"):
    """Parse JSON, rejecting ``NaN``, ``Infinity`` and ``-Infinity`` tokens."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{what}: malformed JSON ({exc})") from exc


def read_json(path, what: str):
    """Load a JSON file; returns ``(object, sha256 hex digest of the raw bytes)``."""
    p = Path(path)
    try:
        raw = p.read_bytes()
    except FileNotFoundError:
        raise InvalidInputError(f"{what}: file not found: {p}") from None
    except OSError as exc:
        raise InvalidInputError(f"{what}: cannot read {p} ({exc.strerror})") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InvalidInputError(f"{what}: {p} is not UTF-8 text") from None
    return loads(text, f"{what} ({p})"), hashlib.sha256(raw).hexdigest()


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidInputError(f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise InvalidInputError(f"{where}: non-finite value")
    return float(x)


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= set(obj):
        raise InvalidInputError(f"{what}: expected an object with 'rows', 'cols' and 'data'")
    rows, cols = obj["rows"], obj["cols"]
    for name, v in (("rows", rows), ("cols", cols)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InvalidInputError(f"{what}: '{name}' must be a positive integer")
    data = obj["data"]
    if not isinstance(data, list) or len(data) != rows:
        raise DimensionMismatchError(f"{what}: 'data' must hold {rows} rows")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise DimensionMismatchError(f"{what}: row {i} must hold {cols} entries")
        for j, entry in enumerate(row):
            where = f"{what}[{i}][{j}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise InvalidInputError(f"{where}: entries are [re, im] pairs")
            out[i, j] = complex(_number(entry[0], where), _number(entry[1], where))
    return out


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with floats at 17 significant digits."""

    def enc(o, level: int) -> str:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None or isinstance(o, bool):
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _float(float(o))
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {enc(v, level + 1)}"
                     for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")

    return enc(obj, 0) + "\n"
