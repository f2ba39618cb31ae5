"""Stroke-level consensus across the multiple drawings of one image.

A stroke survives when a large enough fraction of its rasterized pixels can be
matched into every other annotator's drawing; strokes are kept or dropped
whole, never split.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matching import Tolerance, match_pixels
from .raster import BinaryMap
from .strokes import Drawing, Stroke, rasterize_strokes

DEFAULT_RHO = 0.75
# Strokes that rasterize to fewer pixels than this are too small for a stable
# match fraction; they only need to match one peer instead of all of them.
SHORT_STROKE_PX = 3


@dataclass(frozen=True)
class ConsensusResult:
    """Per-drawing kept stroke indices, the consensus drawing, and the evidence."""

    kept: tuple[tuple[int, ...], ...]
    consensus_drawing: Drawing
    per_stroke_fractions: tuple[np.ndarray, ...]  # one (n_strokes, n_drawings) matrix per drawing

    def kept_drawings(self, ds: Sequence[Drawing]) -> list[Drawing]:
        """Apply the kept-index lists back onto the input drawings."""
        return [
            d.with_strokes([d.strokes[i] for i in idx]) for d, idx in zip(ds, self.kept)
        ]


def stroke_match_fraction(s: Stroke, other: Drawing, tol: Tolerance) -> float:
    """Fraction of the stroke's rasterized pixels matched into the other drawing."""
    stroke_map = rasterize_strokes([s], other.width, other.height, 1.0)
    other_map = rasterize_strokes(other.strokes, other.width, other.height, 1.0)
    return _fraction(stroke_map, other_map, tol)


def _fraction(stroke_map: BinaryMap, other_map: BinaryMap, tol: Tolerance) -> float:
    n = stroke_map.count
    if n == 0:
        return 0.0
    return match_pixels(stroke_map, other_map, tol).n_matched / n


def consensus_drawings(
    ds: Sequence[Drawing],
    tol: Tolerance,
    rho: float = DEFAULT_RHO,
    reference: int = 0,
    union: bool = False,
) -> ConsensusResult:
    """Keep each stroke iff it matches every other drawing at fraction >= rho.

    The consensus drawing is the kept strokes of ``ds[reference]`` by default;
    ``union=True`` merges the kept strokes of all drawings instead (with fresh
    order indices), at the price of multiply-drawn ground truth.
    """
    if len(ds) < 2:
        raise ValueError("consensus needs at least 2 drawings")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    image_ids = {d.image_id for d in ds}
    if len(image_ids) != 1:
        raise ValueError(f"drawings mix image_ids: {sorted(image_ids)}")
    dims = {(d.width, d.height) for d in ds}
    if len(dims) != 1:
        raise ValueError(f"drawings mix canvas sizes: {sorted(dims)}")
    if not 0 <= reference < len(ds):
        raise ValueError(f"reference index {reference} out of range")

    n = len(ds)
    full_maps = [rasterize_strokes(d.strokes, d.width, d.height, 1.0) for d in ds]
    stroke_maps = [
        [rasterize_strokes([s], d.width, d.height, 1.0) for s in d.strokes] for d in ds
    ]

    fractions: list[np.ndarray] = []
    kept: list[tuple[int, ...]] = []
    for i, d in enumerate(ds):
        mat = np.ones((len(d.strokes), n))
        for k, smap in enumerate(stroke_maps[i]):
            for j in range(n):
                if j != i:
                    mat[k, j] = _fraction(smap, full_maps[j], tol)
        mat.flags.writeable = False
        fractions.append(mat)
        peers = [j for j in range(n) if j != i]
        keep_idx = []
        for k, smap in enumerate(stroke_maps[i]):
            hits = [mat[k, j] >= rho for j in peers]
            if smap.count < SHORT_STROKE_PX:
                ok = any(hits)
            else:
                ok = all(hits)
            if ok:
                keep_idx.append(k)
        kept.append(tuple(keep_idx))

    if union:
        merged = []
        order = 0
        for d, idx in zip(ds, kept):
            for k in idx:
                merged.append(Stroke(d.strokes[k].points, order))
                order += 1
        consensus = Drawing(ds[0].image_id, ds[0].width, ds[0].height, tuple(merged), None)
    else:
        ref = ds[reference]
        consensus = Drawing(
            ref.image_id,
            ref.width,
            ref.height,
            tuple(ref.strokes[k] for k in kept[reference]),
            None,
        )
    return ConsensusResult(tuple(kept), consensus, tuple(fractions))
