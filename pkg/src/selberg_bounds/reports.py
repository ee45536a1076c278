"""Report containers and deterministic JSON output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np


@dataclass
class CheckReport:
    """Outcome of one verification routine.

    ``witness`` holds the first offending sample when ``passed`` is false.
    """

    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "details": self.details}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _clean(obj: Any, digits: int) -> Any:
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.{digits}g}")
    if isinstance(obj, complex):
        return {"re": _clean(obj.real, digits), "im": _clean(obj.imag, digits)}
    if isinstance(obj, dict):
        return {str(k): _clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v, digits) for v in obj.tolist()]
    if hasattr(obj, "to_dict"):
        return _clean(obj.to_dict(), digits)
    return obj


def to_json(obj: Any, digits: int = 12) -> str:
    """Serialise with floats rounded to ``digits`` significant digits and sorted keys."""
    return json.dumps(_clean(obj, digits), indent=2, sort_keys=True) + "\n"
