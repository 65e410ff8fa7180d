"""
Report encoding: JSON with fixed float precision for every command, CSV
for sample series meant for plotting.
"""

import csv
import io
import json
import math
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from orbitope_kit.config import config


def _round_significant(value: float, digits: int) -> Optional[float]:
    if not math.isfinite(value):
        return None
    return float(f"{value:.{digits}g}")


def to_plain(obj: Any, digits: Optional[int] = None) -> Any:
    """Convert models, arrays and numpy scalars into JSON-ready Python values."""
    digits = digits or config.output.float_digits
    if isinstance(obj, BaseModel):
        return to_plain(obj.model_dump(mode="python"), digits)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist(), digits)
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, digits) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round_significant(float(obj), digits)
    return obj


def dumps_report(obj: Any) -> str:
    """Deterministic JSON text for a report object."""
    return json.dumps(to_plain(obj), indent=config.output.indent, allow_nan=False)


def write_csv(rows: Iterable[Sequence[Any]], header: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()
