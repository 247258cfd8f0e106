"""Floorplan data model, JSON ingestion and scenario generators.

A floorplan is a rectangular outline ``X x Y`` (always stored with ``X >= Y``)
exactly tiled by axis-aligned rectangular rooms. Each room carries a type
string that must have LOS and NLOS rows in the active parameter table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import jsonschema
import numpy as np

from .channel import CORRIDOR, OFFICE, DsParams, default_params
from .exceptions import GeometryError, ParamError, SchemaError

__all__ = [
    "Room",
    "Floorplan",
    "FLOORPLAN_SCHEMA",
    "parse_floorplan",
    "load_floorplan",
    "floorplan_to_dict",
    "dump_floorplan",
    "generate_grid",
    "generate_partition",
    "generate_winner_a1",
    "room_of",
    "room_index",
]

TILING_RTOL = 1e-9

_NUMBER = {"type": "number"}

FLOORPLAN_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["outline", "tx_height", "rx_height", "rooms"],
    "properties": {
        "id": {"type": "string"},
        "outline": {
            "type": "object",
            "required": ["x", "y"],
            "properties": {"x": _NUMBER, "y": _NUMBER},
        },
        "tx_height": _NUMBER,
        "rx_height": _NUMBER,
        "rooms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "type", "origin", "size"],
                "properties": {
                    "id": {"type": "string"},
                    "type": {"type": "string"},
                    "origin": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
                    "size": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Room:
    """Axis-aligned room occupying ``[x0, x0 + w) x [y0, y0 + h)``."""

    id: str
    room_type: str
    x0: float
    y0: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise GeometryError(f"room {self.id!r}: size must be positive, got {self.w}x{self.h}")

    @property
    def long_edge(self) -> float:
        return max(self.w, self.h)

    @property
    def short_edge(self) -> float:
        return min(self.w, self.h)

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x < self.x0 + self.w and self.y0 <= y < self.y0 + self.h

    def transposed(self) -> "Room":
        return Room(self.id, self.room_type, self.y0, self.x0, self.h, self.w)


@dataclass(frozen=True)
class Floorplan:
    """Validated building layout.

    ``x`` is the long outline edge and ``y`` the short one. Construction
    checks every geometric invariant, so a ``Floorplan`` instance is always
    a gap-free, overlap-free tiling of its outline.
    """

    x: float
    y: float
    rooms: tuple[Room, ...]
    tx_height: float
    rx_height: float
    id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rooms", tuple(self.rooms))
        _validate(self)

    @property
    def area(self) -> float:
        return self.x * self.y

    @property
    def diagonal(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def n_rooms(self) -> int:
        return len(self.rooms)

    @property
    def room_types(self) -> frozenset[str]:
        return frozenset(r.room_type for r in self.rooms)

    def room(self, room_id: str) -> Room:
        for r in self.rooms:
            if r.id == room_id:
                return r
        raise KeyError(room_id)


def _validate(fp: Floorplan) -> None:
    if not (fp.x > 0 and fp.y > 0):
        raise GeometryError(f"outline must be positive, got {fp.x}x{fp.y}")
    if fp.x < fp.y:
        raise GeometryError("outline must satisfy X >= Y; use a normalizing constructor")
    if not (fp.tx_height > 0 and fp.rx_height > 0):
        raise GeometryError("antenna heights must be positive")
    if not fp.rooms:
        raise GeometryError("floorplan has no rooms")

    ids = [r.id for r in fp.rooms]
    if len(set(ids)) != len(ids):
        raise GeometryError("room ids must be unique")

    # absolute slack for float round-off in coordinates
    eps = 1e-9 * max(fp.x, 1.0)
    for r in fp.rooms:
        if r.x0 < -eps or r.y0 < -eps or r.x0 + r.w > fp.x + eps or r.y0 + r.h > fp.y + eps:
            raise GeometryError(f"room {r.id!r} extends outside the {fp.x}x{fp.y} outline")

    x0 = np.array([r.x0 for r in fp.rooms])
    y0 = np.array([r.y0 for r in fp.rooms])
    x1 = x0 + np.array([r.w for r in fp.rooms])
    y1 = y0 + np.array([r.h for r in fp.rooms])
    ox = np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    oy = np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    overlap = np.clip(ox, 0, None) * np.clip(oy, 0, None)
    np.fill_diagonal(overlap, 0.0)
    i, j = np.unravel_index(np.argmax(overlap), overlap.shape)
    if overlap[i, j] > TILING_RTOL * fp.area:
        raise GeometryError(f"rooms {fp.rooms[i].id!r} and {fp.rooms[j].id!r} overlap")

    total = math.fsum(r.area for r in fp.rooms)
    if abs(total - fp.area) > TILING_RTOL * fp.area:
        raise GeometryError(
            f"rooms cover {total} m^2 but the outline is {fp.area} m^2; the tiling must be exact"
        )


def _normalized(x, y, rooms, tx_height, rx_height, id=None) -> Floorplan:
    """Build a floorplan, swapping axes when the outline is taller than wide."""
    if x < y:
        x, y = y, x
        rooms = [r.transposed() for r in rooms]
    return Floorplan(float(x), float(y), tuple(rooms), float(tx_height), float(rx_height), id)


def _check_types(fp: Floorplan, params: DsParams | None) -> None:
    params = default_params() if params is None else params
    missing = sorted(t for t in fp.room_types if not params.has_type(t))
    if missing:
        raise ParamError(f"room types {missing} have no LOS/NLOS rows in the parameter table")


def parse_floorplan(text: str | bytes | dict, params: DsParams | None = None) -> Floorplan:
    """Parse a floorplan JSON document (or an already-decoded dict).

    Raises SchemaError, GeometryError or ParamError.
    """
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, FLOORPLAN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {exc.message}") from None

    rooms = [
        Room(
            str(r["id"]),
            r["type"],
            float(r["origin"][0]),
            float(r["origin"][1]),
            float(r["size"][0]),
            float(r["size"][1]),
        )
        for r in doc["rooms"]
    ]
    fp = _normalized(
        doc["outline"]["x"], doc["outline"]["y"], rooms, doc["tx_height"], doc["rx_height"], doc.get("id")
    )
    _check_types(fp, params)
    return fp


def load_floorplan(path, params: DsParams | None = None) -> Floorplan:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    fp = parse_floorplan(text, params)
    if fp.id is None:
        from pathlib import Path

        object.__setattr__(fp, "id", Path(path).stem)
    return fp


def floorplan_to_dict(fp: Floorplan) -> dict:
    doc: dict[str, Any] = {}
    if fp.id is not None:
        doc["id"] = fp.id
    doc["outline"] = {"x": fp.x, "y": fp.y}
    doc["tx_height"] = fp.tx_height
    doc["rx_height"] = fp.rx_height
    doc["rooms"] = [
        {"id": r.id, "type": r.room_type, "origin": [r.x0, r.y0], "size": [r.w, r.h]} for r in fp.rooms
    ]
    return doc


def dump_floorplan(fp: Floorplan, indent: int | None = 2) -> str:
    return json.dumps(floorplan_to_dict(fp), indent=indent)


def generate_grid(
    rows: int,
    cols: int,
    room_w: float,
    room_h: float,
    room_type: str = OFFICE,
    h_T: float = 4.0,
    h_R: float = 3.0,
    id: str | None = None,
) -> Floorplan:
    """``rows x cols`` identical rooms tiling a ``(cols*room_w) x (rows*room_h)`` outline."""
    if int(rows) != rows or int(cols) != cols or rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive integers")
    if not (room_w > 0 and room_h > 0 and h_T > 0 and h_R > 0):
        raise ValueError("room dimensions and heights must be positive")
    rows, cols = int(rows), int(cols)
    rooms = [
        Room(f"r{i}_{j}", room_type, j * room_w, i * room_h, room_w, room_h)
        for i in range(rows)
        for j in range(cols)
    ]
    return _normalized(cols * room_w, rows * room_h, rooms, h_T, h_R, id or f"grid_{rows}x{cols}")


def generate_partition(
    floor_x: float,
    floor_y: float,
    rows: int,
    cols: int,
    room_type: str = OFFICE,
    h_T: float = 4.0,
    h_R: float = 3.0,
) -> Floorplan:
    """Split a fixed ``floor_x x floor_y`` floor into ``rows x cols`` equal rooms."""
    return generate_grid(rows, cols, floor_x / cols, floor_y / rows, room_type, h_T, h_R,
                         id=f"partition_{rows}x{cols}")


def generate_winner_a1(h_T: float = 4.0, h_R: float = 3.0) -> Floorplan:
    """100 m x 50 m office floor: four rows of ten 10 m offices and two 5 m corridors.

    Bands along the short axis, bottom to top: offices, corridor, offices,
    offices, corridor, offices.
    """
    if not (h_T > 0 and h_R > 0):
        raise ValueError("heights must be positive")
    rooms: list[Room] = []
    y = 0.0
    office_row = 0
    corridor = 0
    for band in (OFFICE, CORRIDOR, OFFICE, OFFICE, CORRIDOR, OFFICE):
        if band == OFFICE:
            office_row += 1
            rooms.extend(
                Room(f"o{office_row}_{j + 1}", OFFICE, 10.0 * j, y, 10.0, 10.0) for j in range(10)
            )
            y += 10.0
        else:
            corridor += 1
            rooms.append(Room(f"c{corridor}", CORRIDOR, 0.0, y, 100.0, 5.0))
            y += 5.0
    return Floorplan(100.0, 50.0, tuple(rooms), float(h_T), float(h_R), "winner_a1")


def room_of(fp: Floorplan, p: Sequence[float]) -> str | None:
    """Id of the room whose half-open rectangle contains point ``p``."""
    x, y = float(p[0]), float(p[1])
    for r in fp.rooms:
        if r.contains(x, y):
            return r.id
    return None


def room_index(fp: Floorplan, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized room lookup: index into ``fp.rooms`` per point, -1 outside."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = np.full(xs.shape, -1, dtype=np.int64)
    for k, r in enumerate(fp.rooms):
        hit = (xs >= r.x0) & (xs < r.x0 + r.w) & (ys >= r.y0) & (ys < r.y0 + r.h)
        out[hit] = k
    return out


def iter_room_groups(fp: Floorplan) -> Iterable[tuple[tuple[str, float, float], list[int]]]:
    """Group room indices by (type, short edge, long edge), in first-seen order."""
    groups: dict[tuple[str, float, float], list[int]] = {}
    for k, r in enumerate(fp.rooms):
        groups.setdefault((r.room_type, r.short_edge, r.long_edge), []).append(k)
    return groups.items()
