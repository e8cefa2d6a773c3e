"""Structured events in the run log.

``log_event`` writes one ``EVENT {...}`` line of compact JSON into the normal
run log, so calibration and run summaries can be grepped out of a long suite
log and loaded with ``pandas.read_json(lines=True)`` after stripping the prefix.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from typing import Any, Optional

import numpy as np

_default_logger = logging.getLogger("rang.events")


def _jsonable(value: Any) -> Any:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def log_event(logger: Optional[logging.Logger], event: str, **fields: Any) -> None:
    """Non-finite floats become null so every line stays valid JSON. Never raises."""
    try:
        record = {"event": event}
        record.update((key, _jsonable(value)) for key, value in fields.items())
        (logger or _default_logger).info("EVENT %s", json.dumps(record, separators=(",", ":"), allow_nan=False))
    except Exception:
        pass
