"""Report rows as CSV or JSON lines.

Every row carries ``schema_version`` and ``command``.  Floats are rendered
with 12 significant digits; the integers they derive from are always present
in the same row.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping

SCHEMA_VERSION = 1


def render(value: Any) -> Any:
    if isinstance(value, bool):
        return "pass" if value else "fail"
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return format(value, ".12g")
    return value


def _json_value(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return float(format(value, ".12g"))
    return value


def make_row(command: str, fields: Mapping[str, Any]) -> dict[str, Any]:
    row = {"schema_version": SCHEMA_VERSION, "command": command}
    row.update(fields)
    return row


def format_rows(rows: Iterable[Mapping[str, Any]], fmt: str = "csv") -> str:
    rows = list(rows)
    out = io.StringIO()
    if fmt == "csv":
        if not rows:
            return ""
        header = list(rows[0])
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            if list(r) != header:
                raise ValueError("rows of one report must share a header")
            w.writerow([render(r[k]) for k in header])
    elif fmt == "json":
        for r in rows:
            out.write(json.dumps({k: _json_value(v) for k, v in r.items()}, separators=(",", ":")))
            out.write("\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return out.getvalue()


def read_rows(text: str, fmt: str = "csv") -> list[dict[str, str]]:
    if fmt == "csv":
        return list(csv.DictReader(io.StringIO(text)))
    return [json.loads(line) for line in text.splitlines() if line.strip()]
