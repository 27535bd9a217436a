"""
JSON reports. Every command builds one ``Report``; ``model_dump_json`` is the
only writer so output is byte-stable for a fixed seed when timing is off.
"""

import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from .constants import SCHEMA_VERSION, VERSION


class Provenance(BaseModel):
    seed: int | None = None
    tolerances: dict[str, float] = Field(default_factory=dict)
    version: str = VERSION


class Report(BaseModel):
    version: str = SCHEMA_VERSION
    command: list[str]
    inputs: dict[str, Any] = Field(default_factory=dict)
    outputs: dict[str, Any] = Field(default_factory=dict)
    provenance: Provenance = Field(default_factory=Provenance)
    timing_ms: float | None = None

    def write(self, path: Path | str) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n")


def tensor(value: np.ndarray | float) -> dict[str, Any]:
    """Shape plus row-major data."""
    arr = np.asarray(value, dtype=float)
    return {"shape": list(arr.shape), "data": [_float(v) for v in arr.ravel()]}


def _float(value: float) -> float | str:
    value = float(value)
    if math.isfinite(value):
        return value
    return "inf" if value > 0 else ("-inf" if value < 0 else "nan")


def jsonable(value: Any) -> Any:
    """Plain JSON types from numpy arrays, enums and pydantic models."""
    if isinstance(value, BaseModel):
        return {k: jsonable(v) for k, v in value.__dict__.items()}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _float(value)
    return value
