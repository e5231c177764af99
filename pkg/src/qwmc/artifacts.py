"""CSV and JSON writers with byte-stable output.

Floats are written with 17 significant digits, CSV rows end in ``\\n``, JSON
keys are sorted.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError


def format_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if hasattr(v, "item"):  # numpy scalar
        return _cell(v.item())
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row[h] for h in header]
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if hasattr(v, "item") and not isinstance(v, (list, dict)):
        v = v.item()
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        # JSON has no inf/nan literal; those go out as strings
        return format_float(v) if math.isfinite(v) else json.dumps(format_float(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v[k], indent, level + 1)}"
                 for k in sorted(v, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _json(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise ValidationError(f"cannot serialize {type(v).__name__}")


def render_json(obj, indent: int = 2) -> str:
    return _json(obj, indent, 0) + "\n"


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(header: Sequence[str], rows: Iterable, path) -> Path:
    return _write(path, render_csv(header, rows))


def emit_json(obj, path) -> Path:
    return _write(path, render_json(obj))


DIST_HEADER = ("outcome_label", "exact_probability", "sampled_frequency")
SCALING_HEADER = ("method", "epsilon", "seed", "oracle_queries", "abs_error")
PHYSICS_HEADER = ("step", "depth_cm", "p_k", "cumulative_survival")


def read_distribution_csv(path, column: str = "sampled_frequency") -> tuple:
    """Read a distribution CSV; returns ``(labels, values)``."""
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or column not in reader.fieldnames \
                    or "outcome_label" not in reader.fieldnames:
                raise ValidationError(f"{path}: needs columns outcome_label and {column}")
            rows = list(reader)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return [r["outcome_label"] for r in rows], [float(r[column]) for r in rows]
