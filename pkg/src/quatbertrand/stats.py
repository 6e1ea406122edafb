"""Small summary statistics and JSON helpers shared by the pair reports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Stat:
    min: float
    max: float

    @classmethod
    def of(cls, values) -> "Stat":
        v = np.asarray(values, dtype=float)
        return cls(float(np.min(v)), float(np.max(v)))

    @property
    def spread(self) -> float:
        return self.max - self.min

    @property
    def mid(self) -> float:
        return 0.5 * (self.min + self.max)

    @property
    def scale(self) -> float:
        return max(abs(self.min), abs(self.max))

    def constant(self, tol: float) -> bool:
        """Scale-aware constancy: spread <= tol (1 + max|v|)."""
        return self.spread <= tol * (1.0 + self.scale)

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "spread": self.spread}


def jsonable(x):
    """Recursively convert numpy scalars/arrays and non-finite floats for json.dumps."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return x


def max_abs(values) -> float:
    return float(np.max(np.abs(np.asarray(values, dtype=float))))
