"""Result records and deterministic JSON serialisation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np


@dataclass
class ResidualStat:
    name: str
    samples: int
    max: float
    mean: float
    tol: float
    verdict: bool
    constants: dict = field(default_factory=dict)
    note: str = ""
    inconclusive: bool = False

    @classmethod
    def from_values(cls, name, values, tol, samples=None, constants=None, note="") -> "ResidualStat":
        vals = np.asarray(list(values), dtype=float)
        if vals.size == 0:
            return cls(name, 0, 0.0, 0.0, tol, True, dict(constants or {}), note or "no samples")
        mx = float(vals.max())
        return cls(
            name,
            int(samples if samples is not None else vals.size),
            mx,
            float(vals.mean()),
            float(tol),
            bool(mx < tol),
            dict(constants or {}),
            note,
        )

    @classmethod
    def gated(cls, name, reason, tol) -> "ResidualStat":
        """Record for a test whose precondition did not hold."""
        return cls(name, 0, float("nan"), float("nan"), tol, False, note=reason, inconclusive=True)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "samples": self.samples,
            "max": self.max,
            "mean": self.mean,
            "tolerance": self.tol,
            "verdict": "inconclusive" if self.inconclusive else ("pass" if self.verdict else "fail"),
        }
        if self.constants:
            out["constants"] = self.constants
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class TheoremVerdict:
    name: str
    status: str  # CONSISTENT | INCONSISTENT | INCONCLUSIVE | CONTRADICTION-CONFIRMED | NOT-CONFIRMED
    reason: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "status": self.status}
        if self.reason:
            out["reason"] = self.reason
        out["details"] = self.details
        return out


def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    return s if ("." in s or "e" in s) else s + ".0"


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _dump(obj, 0, indent)


def _dump(obj, level, indent) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_dump(str(k), level + 1, indent)}: {_dump(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.number, bool, str)) or v is None for v in seq):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in seq) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
