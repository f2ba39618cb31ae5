"""Binary and soft boundary-map primitives.

Maps are thin immutable wrappers around row-major numpy grids, indexed as
``pixels[y, x]`` with the origin at the top-left. All operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

# Stand-in for "no on-pixel anywhere" in squared-distance grids. Chosen so it
# compares larger than any real squared distance.
INF_SQ = np.iinfo(np.int64).max


@dataclass(frozen=True)
class BinaryMap:
    """A width x height grid of on/off boundary pixels."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"binary map must be a non-empty 2-D grid, got shape {arr.shape}")
        arr = arr.astype(bool, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def count(self) -> int:
        """Number of on-pixels."""
        return int(self.pixels.sum())

    def coords(self) -> np.ndarray:
        """On-pixel coordinates as an (n, 2) int array of (x, y) pairs, row-major order."""
        ys, xs = np.nonzero(self.pixels)
        return np.column_stack([xs, ys])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMap):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True)
class SoftMap:
    """A width x height grid of boundary confidences in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"soft map must be a non-empty 2-D grid, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("soft map values must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("soft map values must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SoftMap):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )


def threshold(m: SoftMap, t: float) -> BinaryMap:
    """Binarize a soft map: a pixel is on iff its value is strictly greater than ``t``.

    The strict inequality means t=0 keeps exactly the nonzero pixels, so a
    threshold sweep starting at 0 is well defined.
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"threshold must lie in [0, 1), got {t}")
    return BinaryMap(m.values > t)


# Zhang-Suen neighbour order: P2..P9 clockwise from north.
_ZS_OFFSETS = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)]


def thin(m: BinaryMap) -> BinaryMap:
    """Thin a binary map to one-pixel width with Zhang-Suen two-subcycle thinning.

    Runs both subcycles repeatedly until neither deletes a pixel. The output is
    always a subset of the input.
    """
    img = m.pixels.astype(np.uint8)
    while True:
        changed = False
        for subcycle in (0, 1):
            p = np.pad(img, 1)
            # Neighbour planes, same shape as img.
            n = [p[1 + dy : p.shape[0] - 1 + dy, 1 + dx : p.shape[1] - 1 + dx] for dx, dy in _ZS_OFFSETS]
            b = np.zeros(img.shape, dtype=np.int32)
            for plane in n:
                b += plane
            ring = n + [n[0]]
            a = np.zeros(img.shape, dtype=np.int32)
            for i in range(8):
                a += (ring[i] == 0) & (ring[i + 1] == 1)
            p2, p4, p6, p8 = n[0], n[2], n[4], n[6]
            if subcycle == 0:
                edge = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
            else:
                edge = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
            delete = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & edge
            if delete.any():
                img[delete] = 0
                changed = True
        if not changed:
            return BinaryMap(img.astype(bool))


def _sobel(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel gradients with edge-replicated borders. gy is positive downward."""
    p = np.pad(values, 1, mode="edge")
    tl, tc, tr = p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:]
    ml, mr = p[1:-1, :-2], p[1:-1, 2:]
    bl, bc, br = p[2:, :-2], p[2:, 1:-1], p[2:, 2:]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return gx, gy


def _shift(values: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Values of the neighbour at (x+dx, y+dy); out-of-bounds neighbours read as 0."""
    h, w = values.shape
    out = np.zeros_like(values)
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    ys_src = slice(max(-dy, 0), h + min(-dy, 0))
    xs_src = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys_src, xs_src] = values[ys, xs]
    return out


# Neighbour pairs for the four quantized gradient orientations, in (dx, dy):
# bin 0 ~ 0 deg (gradient along x), bin 1 ~ 45 deg, bin 2 ~ 90 deg, bin 3 ~ 135 deg.
_NMS_NEIGHBOURS = {
    0: ((1, 0), (-1, 0)),
    1: ((1, 1), (-1, -1)),
    2: ((0, 1), (0, -1)),
    3: ((-1, 1), (1, -1)),
}


def nms(m: SoftMap) -> SoftMap:
    """Suppress pixels that are not local maxima across their boundary.

    The Sobel gradient orientation is quantized to 4 bins; a value survives iff
    it is >= both neighbours along the quantized gradient axis (the axis that
    crosses the local ridge). Suppressed values become 0; survivors keep their
    original value, so the output is pointwise <= the input.
    """
    v = m.values
    gx, gy = _sobel(v)
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    bins = np.zeros(v.shape, dtype=np.int8)
    bins[(angle >= 22.5) & (angle < 67.5)] = 1
    bins[(angle >= 67.5) & (angle < 112.5)] = 2
    bins[(angle >= 112.5) & (angle < 157.5)] = 3

    keep = np.zeros(v.shape, dtype=bool)
    for b, ((dx1, dy1), (dx2, dy2)) in _NMS_NEIGHBOURS.items():
        mask = bins == b
        ok = (v >= _shift(v, dx1, dy1)) & (v >= _shift(v, dx2, dy2))
        keep |= mask & ok
    return SoftMap(np.where(keep, v, 0.0))


def _edt_1d_sq(f: np.ndarray) -> np.ndarray:
    """1-D squared distance transform (lower envelope of parabolas) for one row."""
    n = f.shape[0]
    d = np.empty(n)
    v = np.zeros(n, dtype=np.int64)  # parabola sites
    z = np.empty(n + 1)  # envelope breakpoints
    k = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d


def squared_distance_transform(m: BinaryMap) -> np.ndarray:
    """Exact squared Euclidean distance from every pixel to the nearest on-pixel.

    Two-pass separable scheme: column scans for the vertical distance, then a
    per-row lower envelope of parabolas. All intermediate values stay below
    2**53 so the float arithmetic is exact; the result is an int64 grid. An
    all-off map yields INF_SQ everywhere.
    """
    h, w = m.pixels.shape
    if not m.pixels.any():
        return np.full((h, w), INF_SQ, dtype=np.int64)

    # Vertical pixel distance per column, via down then up scans.
    big = h + w + 1
    dist = np.where(m.pixels, 0, big).astype(np.int64)
    for y in range(1, h):
        dist[y] = np.minimum(dist[y], dist[y - 1] + 1)
    for y in range(h - 2, -1, -1):
        dist[y] = np.minimum(dist[y], dist[y + 1] + 1)

    # Columns with no on-pixel keep a sentinel larger than any feasible result.
    f = dist.astype(np.float64) ** 2
    f[dist >= big] = 1e18
    out = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        out[y] = np.rint(_edt_1d_sq(f[y])).astype(np.int64)
    return out


def distance_transform(m: BinaryMap) -> np.ndarray:
    """Exact Euclidean distance grid; np.inf everywhere when the map is empty."""
    sq = squared_distance_transform(m)
    if sq[0, 0] == INF_SQ and not m.pixels.any():
        return np.full(sq.shape, np.inf)
    return np.sqrt(sq.astype(np.float64))


def line_pixels(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """8-connected one-pixel-wide digital line between integer endpoints.

    Midpoint rule: for every step of the driving (longer) axis the pixel whose
    centre is nearest the ideal line is chosen, with exact half ties rounded up.
    Computed in exact integer arithmetic; endpoint order does not matter.
    """
    swapped = False
    if abs(x1 - x0) >= abs(y1 - y0):
        major0, major1, minor0, minor1 = x0, x1, y0, y1
    else:
        major0, major1, minor0, minor1 = y0, y1, x0, x1
        swapped = True
    if major0 > major1:
        major0, major1 = major1, major0
        minor0, minor1 = minor1, minor0
    dmaj = major1 - major0
    dmin = minor1 - minor0
    if dmaj == 0:
        pts = [(major0, minor0)]
    else:
        ks = np.arange(dmaj + 1, dtype=np.int64)
        # minor0 + round_half_up(k * dmin / dmaj), as exact floor division
        minors = minor0 + (2 * ks * dmin + dmaj) // (2 * dmaj)
        pts = list(zip((major0 + ks).tolist(), minors.tolist()))
    if swapped:
        return [(m, M) for M, m in pts]
    return [(M, m) for M, m in pts]


def save_softmap(m: SoftMap, path) -> None:
    """Write a soft map as 8-bit grayscale PNG, value = round(255 * v)."""
    arr = np.round(m.values * 255.0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def load_softmap(path) -> SoftMap:
    arr = np.asarray(Image.open(path).convert("L"), dtype=np.float64)
    return SoftMap(arr / 255.0)


def save_binarymap(m: BinaryMap, path) -> None:
    """Write a binary map as PNG with values {0, 255}."""
    arr = np.where(m.pixels, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def load_binarymap(path) -> BinaryMap:
    arr = np.asarray(Image.open(path).convert("L"))
    return BinaryMap(arr > 0)
