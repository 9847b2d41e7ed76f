"""Deterministic JSON reports.

Keys are sorted, floats are rounded to four decimals and the file ends in a
newline, so identical runs write byte-identical reports.
"""

import json
import math
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from src.models.config import RunManifest
from src.models.reports import round_report
from .atomic import atomic_write_text


def _clean(value: Any) -> Any:
    """Convert numpy scalars/arrays and round floats recursively."""
    if isinstance(value, Mapping):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return None
        return round_report(value)
    return value


def render_report(body: Mapping[str, Any], manifest: Optional[RunManifest] = None) -> str:
    """Serialise a report body (plus ``manifest``) to canonical JSON text."""
    payload = dict(body)
    if manifest is not None:
        payload["manifest"] = manifest.to_dict()
    return json.dumps(_clean(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(
    path: Path,
    body: Mapping[str, Any],
    manifest: Optional[RunManifest] = None,
) -> Path:
    """Write a JSON report atomically.

    Raises:
        IoError: If the file cannot be written
    """
    return atomic_write_text(Path(path), render_report(body, manifest))
