"""Run configuration: one JSON document with an explicit schema version."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import weights as W

SCHEMA_VERSION = 1
SUITES = ("weights", "quasi", "conv", "shift", "measure", "symbol", "poly", "beurling")
FAMILY_KINDS = ("shifted-geometric", "geometric", "one-term", "explicit")

DEFAULT_TOLERANCES = {
    "identity": 1e-3,        # two-route operator identities on the grid
    "young_rtol": 1e-6,
    "halfplane": 1e-6,
    "gram_offdiag": 1e-8,
    "gram_diag": 1e-6,
    "translation": 1e-10,
    "split_grid": 1e-6,
}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists (field path, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))


@dataclass(frozen=True)
class FamilySpec:
    kind: str = "shifted-geometric"
    a: float | None = 0.5
    K: int | None = 64
    a1: float | None = None
    v1: float | None = None
    a_list: tuple[float, ...] | None = None
    v_list: tuple[float, ...] | None = None

    def build(self, alpha: float) -> W.WeightFamily:
        if self.kind == "shifted-geometric":
            return W.shifted_geometric(self.a, self.K, alpha)
        if self.kind == "geometric":
            return W.geometric(self.a, self.K, alpha)
        if self.kind == "one-term":
            return W.one_term(self.a1, self.v1, alpha)
        return W.explicit(self.a_list, self.v_list, alpha)


@dataclass(frozen=True)
class GridSpec:
    per_cell: int = 64
    M: int = 2**14


@dataclass(frozen=True)
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    family: FamilySpec = field(default_factory=FamilySpec)
    alpha: float = 1.0
    N: int = 200
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    suites: tuple[str, ...] = SUITES

    def with_suites(self, suites) -> "RunConfig":
        return RunConfig(self.schema_version, self.family, self.alpha, self.N, self.grid,
                         dict(self.tolerances), self.seed, tuple(suites))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["family"] = {k: (list(v) if isinstance(v, tuple) else v)
                       for k, v in d["family"].items() if v is not None}
        d["suites"] = list(self.suites)
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d


def _num(value, path, errors, kind=float, positive=True):
    ok_types = (int,) if kind is int else (int, float)
    if isinstance(value, bool) or not isinstance(value, ok_types):
        errors.append((path, f"expected {'an integer' if kind is int else 'a number'}"))
        return None
    if kind is float and not math.isfinite(value):
        errors.append((path, "must be finite"))
        return None
    if positive and value <= 0:
        errors.append((path, "must be positive"))
        return None
    return kind(value)


def _unknown(d: dict, allowed, prefix: str, errors) -> None:
    for key in sorted(set(d) - set(allowed)):
        errors.append((f"{prefix}{key}", "unknown field"))


def _family(d: Any, errors) -> FamilySpec | None:
    if not isinstance(d, dict):
        errors.append(("family", "expected an object"))
        return None
    kind = d.get("kind", "shifted-geometric")
    if kind not in FAMILY_KINDS:
        errors.append(("family.kind", f"expected one of {list(FAMILY_KINDS)}"))
        return None
    n0 = len(errors)
    if kind in ("shifted-geometric", "geometric"):
        _unknown(d, ("kind", "a", "K"), "family.", errors)
        a = _num(d.get("a", 0.5), "family.a", errors)
        if a is not None and not a < 1:
            errors.append(("family.a", "must lie in (0, 1)"))
        K = _num(d.get("K", 64), "family.K", errors, int)
        fam = FamilySpec(kind, a, K)
    elif kind == "one-term":
        _unknown(d, ("kind", "a1", "v1"), "family.", errors)
        a1 = _num(d.get("a1", 1.0), "family.a1", errors)
        if a1 is not None and a1 > 1:
            errors.append(("family.a1", "must not exceed 1"))
        fam = FamilySpec(kind, None, None, a1, _num(d.get("v1", 1.0), "family.v1", errors))
    else:
        _unknown(d, ("kind", "a", "v"), "family.", errors)
        lists = {}
        for key in ("a", "v"):
            vals = d.get(key)
            if not isinstance(vals, list) or not vals:
                errors.append((f"family.{key}", "expected a nonempty list"))
                continue
            lists[key] = tuple(_num(x, f"family.{key}[{i}]", errors) for i, x in enumerate(vals))
        if len(lists) == 2:
            a, v = lists["a"], lists["v"]
            if len(a) != len(v):
                errors.append(("family.v", "must have the same length as family.a"))
            elif len(errors) == n0:
                bad = [i for i in range(1, len(v)) if not v[i] < v[i - 1]]
                if bad:
                    errors.append((f"family.v[{bad[0]}]", "v must be strictly decreasing"))
                if math.fsum(a) > 1 + 1e-15:
                    errors.append(("family.a", "sum of a must not exceed 1"))
        fam = FamilySpec(kind, None, None, None, None, lists.get("a"), lists.get("v"))
    return fam if len(errors) == n0 else None


def validate(raw: Any) -> RunConfig:
    """Build a RunConfig, collecting every problem with its field path."""
    errors: list[tuple[str, str]] = []
    if not isinstance(raw, dict):
        raise ConfigError([("", "expected a JSON object")])
    allowed = ("schema_version", "family", "alpha", "N", "grid", "tolerances", "seed", "suites")
    _unknown(raw, allowed, "", errors)
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.append(("schema_version", f"expected {SCHEMA_VERSION}"))
    family = _family(raw.get("family", {}), errors)
    alpha = _num(raw.get("alpha", 1.0), "alpha", errors)
    N = _num(raw.get("N", 200), "N", errors, int)
    if N is not None and N < 4:
        errors.append(("N", "must be at least 4"))
    g = raw.get("grid", {})
    grid = None
    if not isinstance(g, dict):
        errors.append(("grid", "expected an object"))
    else:
        _unknown(g, ("per_cell", "M"), "grid.", errors)
        per_cell = _num(g.get("per_cell", 64), "grid.per_cell", errors, int)
        M = _num(g.get("M", 2**14), "grid.M", errors, int)
        if per_cell is not None and per_cell % 4:
            errors.append(("grid.per_cell", "must be a multiple of 4"))
        if M is not None and per_cell is not None and M < 64 * per_cell:
            errors.append(("grid.M", "window must span at least 64 cells"))
        if per_cell is not None and M is not None:
            grid = GridSpec(per_cell, M)
    tol = dict(DEFAULT_TOLERANCES)
    t = raw.get("tolerances", {})
    if not isinstance(t, dict):
        errors.append(("tolerances", "expected an object"))
    else:
        _unknown(t, DEFAULT_TOLERANCES, "tolerances.", errors)
        for key in sorted(set(t) & set(DEFAULT_TOLERANCES)):
            val = _num(t[key], f"tolerances.{key}", errors)
            if val is not None:
                tol[key] = val
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append(("seed", "expected a nonnegative integer"))
    suites = raw.get("suites", list(SUITES))
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        errors.append(("suites", "expected a list of suite names"))
        suites = []
    for i, s in enumerate(suites):
        if s not in SUITES:
            errors.append((f"suites[{i}]", f"unknown suite {s!r}"))
    if family is not None and alpha is not None and not errors:
        try:
            family.build(alpha)
        except ValueError as exc:
            errors.append(("family", str(exc)))
    if errors:
        raise ConfigError(errors)
    return RunConfig(SCHEMA_VERSION, family, alpha, N, grid, tol, seed, tuple(dict.fromkeys(suites)))


def load(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"invalid JSON: {exc}")]) from None
    return validate(raw)
