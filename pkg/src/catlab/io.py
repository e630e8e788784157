"""CSV / JSON serialization of command output.

Rows are plain dicts.  Infinite floats are written as the literal ``inf``;
NaN is refused.  JSON documents carry a ``"schema": "v1"`` tag.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Optional, TextIO

from .errors import InvariantError

SCHEMA_VERSION = "v1"

Row = Mapping[str, Any]


def _cell(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "is_infinite") and hasattr(value, "value"):
        value = value.value
    value = float(value)
    if math.isnan(value):
        raise InvariantError("refusing to emit NaN")
    if math.isinf(value):
        if value < 0:
            raise InvariantError("refusing to emit -inf")
        return "inf"
    return value


def _columns(rows: list[Row]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    return cols


def to_csv(rows: Iterable[Row]) -> str:
    rows = list(rows)
    buf = io.StringIO()
    cols = _columns(rows)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = _cell(row.get(c))
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()


def _parse(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if text == "inf":
        return math.inf
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> list[dict[str, Any]]:
    """Inverse of :func:`to_csv` (``inf`` comes back as ``math.inf``)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [{k: _parse(v) for k, v in zip(header, line)} for line in reader]


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _cell(obj)


def to_json(command: str, params: Mapping[str, Any], results: Any) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "params": _jsonable(params),
        "results": _jsonable(results),
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write(text: str, out: Optional[str], stdout: TextIO) -> None:
    if out in (None, "-"):
        stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
