"""Import-only SVG bridge: path (M/L/C) and polyline elements become strokes.

Cubic segments are flattened by recursive midpoint subdivision until the
control polygon sits within ``flatten_tol`` of the chord, which (by the convex
hull property) bounds the polyline's deviation from the exact curve.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET

from .strokes import Drawing, build_drawing

DEFAULT_FLATTEN_TOL = 0.25  # px; half the granularity the evaluation tolerance cares about


class SvgImportError(ValueError):
    """Raised for SVG input outside the supported subset."""


_NUMBER = re.compile(r"[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?")
_TOKEN = re.compile(_NUMBER.pattern + r"|[A-Za-z]")


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    # distance to the chord *segment*: a control point collinear with the chord
    # but beyond its ends still counts as deviation (the curve overshoots there)
    dx, dy = bx - ax, by - ay
    norm_sq = dx * dx + dy * dy
    if norm_sq < 1e-24:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / norm_sq))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _flatten_cubic(p0, p1, p2, p3, tol: float, out: list) -> None:
    """Append points approximating the cubic from p0 to p3 (excluding p0)."""
    dev = max(
        _point_segment_distance(p1[0], p1[1], p0[0], p0[1], p3[0], p3[1]),
        _point_segment_distance(p2[0], p2[1], p0[0], p0[1], p3[0], p3[1]),
    )
    if dev <= tol:
        out.append(p3)
        return
    # de Casteljau split at t = 1/2
    mid = lambda a, b: ((a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5)
    p01, p12, p23 = mid(p0, p1), mid(p1, p2), mid(p2, p3)
    p012, p123 = mid(p01, p12), mid(p12, p23)
    c = mid(p012, p123)
    _flatten_cubic(p0, p01, p012, c, tol, out)
    _flatten_cubic(c, p123, p23, p3, tol, out)


def _parse_path(d: str, tol: float) -> list[list[tuple[float, float]]]:
    """Parse a path `d` string into one polyline per subpath. Only M/L/C (any case)."""
    stream = [m.group(0) for m in _TOKEN.finditer(d)]
    subpaths: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    pos = (0.0, 0.0)
    cmd: str | None = None
    started = False
    i = 0

    def read_floats(n: int) -> list[float]:
        nonlocal i
        if i + n > len(stream):
            raise SvgImportError(f"path data ended mid-command {cmd!r}")
        vals = []
        for _ in range(n):
            tok = stream[i]
            if re.fullmatch(r"[A-Za-z]", tok):
                raise SvgImportError(f"expected number in path data, got {tok!r}")
            vals.append(float(tok))
            i += 1
        return vals

    def flush():
        nonlocal current
        if len(current) >= 2:
            subpaths.append(current)
        current = []

    while i < len(stream):
        tok = stream[i]
        if re.fullmatch(r"[A-Za-z]", tok):
            if tok not in "MmLlCc":
                raise SvgImportError(f"unsupported SVG path command {tok!r}")
            cmd = tok
            i += 1
            if cmd in "Mm":
                flush()
                x, y = read_floats(2)
                # a leading 'm' is absolute; later ones are relative
                pos = (pos[0] + x, pos[1] + y) if cmd == "m" and started else (x, y)
                current = [pos]
                started = True
                cmd = "L" if cmd == "M" else "l"  # extra pairs are implicit linetos
                continue
        if cmd is None:
            raise SvgImportError("path data must start with a moveto command")
        if not current:
            raise SvgImportError(f"{cmd!r} before any moveto")
        if cmd in "Ll":
            x, y = read_floats(2)
            pos = (pos[0] + x, pos[1] + y) if cmd == "l" else (x, y)
            current.append(pos)
        else:  # C / c
            v = read_floats(6)
            if cmd == "c":
                pts = [(pos[0] + v[j], pos[1] + v[j + 1]) for j in (0, 2, 4)]
            else:
                pts = [(v[j], v[j + 1]) for j in (0, 2, 4)]
            flat: list[tuple[float, float]] = []
            _flatten_cubic(pos, pts[0], pts[1], pts[2], tol, flat)
            current.extend(flat)
            pos = pts[2]
    flush()
    return subpaths


def _parse_polyline(points_attr: str) -> list[tuple[float, float]]:
    vals = [float(v) for v in _NUMBER.findall(points_attr)]
    if len(vals) % 2 != 0:
        raise SvgImportError("polyline points attribute has an odd number of values")
    return [(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_dimension(value: str | None, name: str) -> int:
    if value is None:
        raise SvgImportError(f"SVG is missing the {name} attribute")
    v = value.strip()
    if v.endswith("px"):
        v = v[:-2]
    try:
        size = float(v)
    except ValueError as e:
        raise SvgImportError(f"cannot parse {name}={value!r}") from e
    if size <= 0:
        raise SvgImportError(f"{name} must be positive, got {value!r}")
    return int(round(size))


def import_svg(
    text: str,
    image_id: str = "",
    annotator_id: str | None = None,
    flatten_tol: float = DEFAULT_FLATTEN_TOL,
) -> Drawing:
    """Convert an SVG document to a Drawing.

    Each path subpath and each polyline becomes one stroke, numbered in
    document order. Degenerate elements (fewer than 2 distinct points after
    clamping) are skipped rather than rejected.
    """
    if flatten_tol <= 0:
        raise ValueError("flatten_tol must be positive")
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise SvgImportError(f"malformed SVG: {e}") from e
    width = _parse_dimension(root.get("width"), "width")
    height = _parse_dimension(root.get("height"), "height")

    polylines: list[list[tuple[float, float]]] = []
    for el in root.iter():
        tag = _strip_ns(el.tag)
        if tag == "path":
            d = el.get("d")
            if d:
                polylines.extend(_parse_path(d, flatten_tol))
        elif tag == "polyline":
            pts = _parse_polyline(el.get("points", ""))
            if len(pts) >= 2:
                polylines.append(pts)

    raw_strokes = []
    order = 0
    for pts in polylines:
        # drop polylines that collapse after clamping instead of failing the import
        clamped = [
            (min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height))) for x, y in pts
        ]
        deduped = [clamped[0]]
        for p in clamped[1:]:
            if p != deduped[-1]:
                deduped.append(p)
        if len(deduped) < 2:
            continue
        raw_strokes.append((order, deduped))
        order += 1
    return build_drawing(image_id, width, height, raw_strokes, annotator_id)
