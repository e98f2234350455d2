"""CSV/JSON serialization with a leading metadata block.

CSV cells use 17 significant digits and ``\\n`` line endings; empty cells
stand for undefined values.  JSON keys are sorted so that equal inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def csv_text(meta: dict, header: list, columns: list) -> str:
    lines = [f"# {k}: {meta[k]}" for k in sorted(meta)]
    lines.append(",".join(header))
    n = len(columns[0]) if columns else 0
    for i in range(n):
        lines.append(",".join(fmt(col[i]) for col in columns))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_text(meta: dict, payload: dict) -> str:
    body = dict(payload)
    body["meta"] = meta
    return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"


def write(path: Path | str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
