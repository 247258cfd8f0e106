"""Parametric layout studies: one evaluated row per swept value."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .analytic import QuadratureSpec, ds_gain
from .channel import OFFICE, DsParams, default_params
from .exceptions import SchemaError
from .layout import Floorplan, generate_grid, generate_partition

__all__ = ["SWEEP_KINDS", "SweepSpec", "sweep_floorplan", "run_sweep", "load_sweep_spec"]

SWEEP_KINDS = ("aspect_ratio", "room_area", "grid_n_by_n", "grid_n_by_2n", "room_count")

_DEFAULT_BASE: dict[str, dict[str, Any]] = {
    "aspect_ratio": {"rows": 10, "cols": 6, "room_area": 9.0},
    "room_area": {"rows": 10, "cols": 6, "aspect_ratio": 1.0},
    "grid_n_by_n": {"floor_x": 30.0, "floor_y": 30.0},
    "grid_n_by_2n": {"floor_x": 30.0, "floor_y": 30.0},
    "room_count": {"room_w": 10.0, "room_h": 10.0},
}


@dataclass(frozen=True)
class SweepSpec:
    """A sweep over one layout parameter.

    ``base`` holds the fixed layout parameters; missing keys fall back to
    per-kind defaults (10-by-6 grid of 9 m^2 rooms, 30 x 30 m floor, ...).
    Every kind also honours ``room_type``, ``tx_height`` and ``rx_height``.
    """

    kind: str
    values: tuple[float, ...]
    base: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise SchemaError(f"unknown sweep kind {self.kind!r}; expected one of {SWEEP_KINDS}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise SchemaError("sweep needs at least one value")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise SchemaError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "base", {**_DEFAULT_BASE[self.kind], **dict(self.base)})


def _elongated(rows: int, cols: int, long_edge: float, short_edge: float) -> tuple[float, float]:
    # long room edge runs along the axis holding more rooms, so the building
    # grows longer and narrower as the rooms stretch
    if rows >= cols:
        return short_edge, long_edge
    return long_edge, short_edge


def _count(v: float, what: str) -> int:
    if v != int(v) or v < 1:
        raise SchemaError(f"{what} must be a positive integer, got {v}")
    return int(v)


def sweep_floorplan(kind: str, value: float, base: dict) -> Floorplan:
    """Floorplan for one point of a sweep."""
    room_type = base.get("room_type", OFFICE)
    hT = float(base.get("tx_height", 4.0))
    hR = float(base.get("rx_height", 3.0))

    if kind in ("aspect_ratio", "room_area"):
        rows, cols = _count(base["rows"], "rows"), _count(base["cols"], "cols")
        r = value if kind == "aspect_ratio" else float(base["aspect_ratio"])
        if r < 1:
            raise SchemaError("aspect ratio is long/short edge and must be >= 1")
        if kind == "aspect_ratio" and "room_diagonal" in base:
            diag = float(base["room_diagonal"])
            long_edge, short_edge = diag * r / math.hypot(1.0, r), diag / math.hypot(1.0, r)
        else:
            area = value if kind == "room_area" else float(base["room_area"])
            long_edge, short_edge = math.sqrt(area * r), math.sqrt(area / r)
        w, h = _elongated(rows, cols, long_edge, short_edge)
        return generate_grid(rows, cols, w, h, room_type, hT, hR)
    if kind == "grid_n_by_n":
        n = _count(value, "N")
        return generate_partition(float(base["floor_x"]), float(base["floor_y"]), n, n, room_type, hT, hR)
    if kind == "grid_n_by_2n":
        n = _count(value, "N")
        return generate_partition(float(base["floor_x"]), float(base["floor_y"]), n, 2 * n, room_type, hT, hR)
    if kind == "room_count":
        n = _count(value, "room count")
        cols = _count(base.get("cols", n), "cols")
        return generate_grid(n, cols, float(base["room_w"]), float(base["room_h"]), room_type, hT, hR)
    raise SchemaError(f"unknown sweep kind {kind!r}")


def run_sweep(
    spec: SweepSpec,
    p: DsParams | None = None,
    q: QuadratureSpec | None = None,
    threads: int | None = None,
) -> list[tuple[float, float, float]]:
    """Rows of (parameter value, ds_gain_ns, reliability_ns) in value order."""
    p = default_params() if p is None else p
    rows = []
    for v in spec.values:
        rep = ds_gain(sweep_floorplan(spec.kind, v, spec.base), p, q, threads=threads)
        rows.append((v, rep.ds_gain, rep.reliability_sigma))
    return rows


def load_sweep_spec(path) -> SweepSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed sweep spec: {exc}") from exc
    try:
        return SweepSpec(doc["kind"], tuple(doc["values"]), doc.get("base", {}), doc.get("output"))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"sweep spec missing or mistyped field: {exc}") from None
