"""CSV/JSON writers shared by the command line and the library."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence, Union

import numpy as np

PathLike = Union[str, Path]


def _fmt(v) -> str:
    return format(float(v), ".17g")


def csv_text(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


def write_csv(path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    Path(path).write_text(csv_text(header, columns))


def trajectory_csv(t, y) -> str:
    y = np.asarray(y)
    return csv_text(("t", "S", "I", "Q"), (t, y[:, 0], y[:, 1], y[:, 2]))


def histogram_csv(hist) -> str:
    return csv_text(("edge_lo", "edge_hi", "density"),
                    (hist.edges[:-1], hist.edges[1:], hist.densities))


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def json_text(obj) -> str:
    """Strict JSON (non-finite floats become null), keys in insertion order."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path: PathLike, obj) -> None:
    Path(path).write_text(json_text(obj))
