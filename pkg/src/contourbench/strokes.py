"""Vector drawing model: strokes of control points, canonical JSON, resampling,
rasterization, and collection statistics.

The canonical on-disk form is JSON (see ``serialize_drawing``); SVG is an
import-only bridge handled in ``svg_import``. All types are immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .raster import BinaryMap, line_pixels


class DrawingFormatError(ValueError):
    """Raised when a drawing document violates the canonical schema."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Stroke:
    """An ordered polyline of control points plus its position in drawing order."""

    points: tuple[Point, ...]
    order_index: int

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("a stroke needs at least 2 points")
        for a, b in zip(self.points, self.points[1:]):
            if a == b:
                raise ValueError("consecutive duplicate points are not allowed in a stroke")
        if self.order_index < 0:
            raise ValueError("order_index must be non-negative")

    def as_array(self) -> np.ndarray:
        """Control points as an (n, 2) float array."""
        return np.array([(p.x, p.y) for p in self.points], dtype=np.float64)

    @property
    def length(self) -> float:
        """Total arc length of the polyline."""
        d = np.diff(self.as_array(), axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())


@dataclass(frozen=True)
class Drawing:
    image_id: str
    width: int
    height: int
    strokes: tuple[Stroke, ...]
    annotator_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"drawing dimensions must be positive, got {self.width}x{self.height}")
        order = [s.order_index for s in self.strokes]
        if len(set(order)) != len(order):
            raise ValueError("stroke order_index values must be unique within a drawing")
        if order != sorted(order):
            raise ValueError("strokes must be sorted by order_index")
        for s in self.strokes:
            for p in s.points:
                if not (0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height):
                    raise ValueError(
                        f"stroke point ({p.x}, {p.y}) lies outside the {self.width}x{self.height} canvas"
                    )

    @property
    def n_control_points(self) -> int:
        return sum(len(s.points) for s in self.strokes)

    def with_strokes(self, strokes: Iterable[Stroke]) -> "Drawing":
        return Drawing(self.image_id, self.width, self.height, tuple(strokes), self.annotator_id)


def _normalize_points(raw: Sequence[Sequence[float]], width: int, height: int) -> list[Point]:
    """Clamp points to the canvas and drop consecutive duplicates."""
    out: list[Point] = []
    for xy in raw:
        x, y = float(xy[0]), float(xy[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DrawingFormatError(f"non-finite point ({x}, {y})")
        p = Point(min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height)))
        if not out or out[-1] != p:
            out.append(p)
    return out


def build_drawing(
    image_id: str,
    width: int,
    height: int,
    raw_strokes: Iterable[tuple[int, Sequence[Sequence[float]]]],
    annotator_id: str | None = None,
) -> Drawing:
    """Construct a Drawing from raw (order_index, [[x, y], ...]) strokes.

    Ingest normalization: points are clamped to the canvas, consecutive
    duplicates are merged, and strokes are sorted by order_index. A stroke
    left with fewer than 2 distinct points is an error.
    """
    strokes = []
    for order_index, raw in raw_strokes:
        pts = _normalize_points(raw, width, height)
        if len(pts) < 2:
            raise DrawingFormatError(
                f"stroke {order_index} has fewer than 2 distinct points after clamping"
            )
        strokes.append(Stroke(tuple(pts), int(order_index)))
    strokes.sort(key=lambda s: s.order_index)
    return Drawing(str(image_id), int(width), int(height), tuple(strokes), annotator_id)


def parse_drawing(text: str) -> Drawing:
    """Parse a canonical drawing JSON document, enforcing ingest normalization."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DrawingFormatError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise DrawingFormatError("document root must be an object")
    for key in ("image_id", "width", "height", "strokes"):
        if key not in doc:
            raise DrawingFormatError(f"missing required field {key!r}")
    width, height = doc["width"], doc["height"]
    if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
        raise DrawingFormatError(f"width/height must be positive integers, got {width!r}x{height!r}")
    annotator = doc.get("annotator_id")
    if annotator is not None and not isinstance(annotator, str):
        raise DrawingFormatError("annotator_id must be a string or null")
    raw_strokes = []
    if not isinstance(doc["strokes"], list):
        raise DrawingFormatError("strokes must be a list")
    for s in doc["strokes"]:
        if not isinstance(s, dict) or "order_index" not in s or "points" not in s:
            raise DrawingFormatError("each stroke needs order_index and points")
        raw_strokes.append((s["order_index"], s["points"]))
    try:
        return build_drawing(doc["image_id"], width, height, raw_strokes, annotator)
    except ValueError as e:
        raise DrawingFormatError(str(e)) from e


def drawing_to_dict(d: Drawing) -> dict:
    """Canonical dict form of a drawing, with fixed key order."""
    return {
        "image_id": d.image_id,
        "width": d.width,
        "height": d.height,
        "annotator_id": d.annotator_id,
        "strokes": [
            {"order_index": s.order_index, "points": [[p.x, p.y] for p in s.points]}
            for s in d.strokes
        ],
    }


def serialize_drawing(d: Drawing) -> str:
    """Serialize to the canonical JSON document.

    Key order is fixed and floats use Python's shortest round-trip repr, so the
    output is byte-identical across calls and ``parse_drawing`` inverts it.
    """
    return json.dumps(drawing_to_dict(d), separators=(",", ":"))


def resample_stroke(s: Stroke, spacing: float) -> Stroke:
    """Resample so consecutive points are at most ``spacing`` apart in arc length.

    Every original vertex is kept (so corners survive) and each segment is split
    into equal parts. Resampling an already-resampled stroke is a no-op.
    """
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    out = [s.points[0]]
    for a, b in zip(s.points, s.points[1:]):
        seg_len = math.hypot(b.x - a.x, b.y - a.y)
        pieces = max(1, math.ceil(seg_len / spacing - 1e-9))
        for i in range(1, pieces):
            t = i / pieces
            out.append(Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
        out.append(b)
    return Stroke(tuple(out), s.order_index)


def _round_half_up(v: float) -> int:
    return math.floor(v + 0.5)


def rasterize_strokes(
    strokes: Iterable[Stroke], width: int, height: int, scale: float = 1.0
) -> BinaryMap:
    """Rasterize polylines onto a round(width*scale) x round(height*scale) grid.

    Each segment becomes an 8-connected one-pixel-wide digital line between its
    endpoint pixels (vertices snap to the nearest pixel centre, clamped to the
    grid). No anti-aliasing.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    w = _round_half_up(width * scale)
    h = _round_half_up(height * scale)
    if w <= 0 or h <= 0:
        raise ValueError(f"rasterization target {w}x{h} has zero area")
    grid = np.zeros((h, w), dtype=bool)
    for s in strokes:
        px = [
            (
                min(max(_round_half_up(p.x * scale), 0), w - 1),
                min(max(_round_half_up(p.y * scale), 0), h - 1),
            )
            for p in s.points
        ]
        for (x0, y0), (x1, y1) in zip(px, px[1:]):
            for x, y in line_pixels(x0, y0, x1, y1):
                grid[y, x] = True
    return BinaryMap(grid)


def rasterize_drawing(d: Drawing, scale: float = 1.0) -> BinaryMap:
    return rasterize_strokes(d.strokes, d.width, d.height, scale)


def drawing_stats(ds: Sequence[Drawing]) -> dict:
    """Mean stroke and control-point counts over a collection of drawings."""
    if not ds:
        raise ValueError("cannot compute statistics of an empty collection")
    n = len(ds)
    return {
        "n_drawings": n,
        "mean_strokes": sum(len(d.strokes) for d in ds) / n,
        "mean_control_points": sum(d.n_control_points for d in ds) / n,
    }
