"""Uniform record type returned by every numerical check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one inequality or identity check.

    For an inequality ``lhs <= rhs`` the margin is ``rhs - lhs``. For a
    discrepancy check ``lhs`` is the measured discrepancy and ``rhs`` the
    tolerance it must not exceed. ``witness`` names the index or sample that
    attains the worst case, ``rows`` optionally carries a per-index table.
    """

    name: str
    passed: bool
    lhs: float
    rhs: float
    margin: float
    witness: tuple = ()
    details: dict[str, Any] = field(default_factory=dict)
    rows: tuple[dict[str, Any], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "margin": _jsonable(self.margin),
            "witness": [_jsonable(w) for w in self.witness],
            "details": {k: _jsonable(v) for k, v in sorted(self.details.items())},
        }


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, complex):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items())}
    if hasattr(value, "item") and getattr(value, "shape", None) == ():
        return _jsonable(value.item())
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    return str(value)
