"""Dataset-level boundary benchmark: per-image P/R sweeps and ODS/OIS rollups.

Aggregation is micro-averaged: pixel counts are summed across images before
precision/recall are formed, following the established boundary benchmarks.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Sequence

from .matching import Tolerance, f1_score, match_pixels
from .raster import SoftMap, nms, thin, threshold
from .strokes import Drawing, rasterize_drawing

# 99 equally spaced thresholds, 0.01 .. 0.99.
DEFAULT_THRESHOLDS = tuple(round(0.01 * k, 2) for k in range(1, 100))


@dataclass(frozen=True)
class ThresholdCounts:
    t: float
    n_pred: int
    n_gt: int
    n_matched: int

    def __post_init__(self):
        if self.n_matched > min(self.n_pred, self.n_gt):
            raise ValueError("matched count exceeds a side's pixel count")

    @property
    def precision(self) -> float:
        return 1.0 if self.n_pred == 0 else self.n_matched / self.n_pred

    @property
    def recall(self) -> float:
        return 1.0 if self.n_gt == 0 else self.n_matched / self.n_gt

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)


@dataclass(frozen=True)
class ImageEval:
    image_id: str
    rows: tuple[ThresholdCounts, ...]

    def __post_init__(self):
        ts = [r.t for r in self.rows]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("thresholds must be strictly increasing")

    def best_row(self) -> ThresholdCounts:
        """Row with the highest F1; ties go to the lowest threshold."""
        return max(self.rows, key=lambda r: (r.f1, -r.t))


@dataclass(frozen=True)
class EvalSummary:
    ods: dict
    ois: dict
    per_image: tuple[ImageEval, ...]


def evaluate_prediction(
    pred: "SoftMap | Drawing",
    gt: Drawing,
    tol: Tolerance,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    thin_pred: bool = True,
) -> ImageEval:
    """Match a prediction against the rasterized consensus drawing.

    Soft maps go through non-maximum suppression once, then per threshold:
    binarize, optionally thin, and match. A Drawing prediction is rasterized
    and recorded as a single pseudo-threshold 0 row.
    """
    gt_map = rasterize_drawing(gt, 1.0)
    n_gt = gt_map.count

    if isinstance(pred, Drawing):
        if (pred.width, pred.height) != (gt.width, gt.height):
            raise ValueError("prediction and ground-truth dimensions differ")
        pred_map = rasterize_drawing(pred, 1.0)
        m = match_pixels(pred_map, gt_map, tol)
        row = ThresholdCounts(0.0, pred_map.count, n_gt, m.n_matched)
        return ImageEval(gt.image_id, (row,))

    if (pred.width, pred.height) != (gt.width, gt.height):
        raise ValueError("prediction and ground-truth dimensions differ")
    if not thresholds:
        raise ValueError("threshold list is empty")
    ts = sorted(set(float(t) for t in thresholds))
    suppressed = nms(pred)
    rows = []
    for t in ts:
        bm = threshold(suppressed, t)
        if thin_pred:
            bm = thin(bm)
        m = match_pixels(bm, gt_map, tol)
        rows.append(ThresholdCounts(t, bm.count, n_gt, m.n_matched))
    return ImageEval(gt.image_id, tuple(rows))


def _evaluate_one(task) -> ImageEval:
    pred, gt, tol, thresholds, thin_pred = task
    return evaluate_prediction(pred, gt, tol, thresholds, thin_pred)


def evaluate_batch(
    tasks: "Sequence[tuple]",
    jobs: int = 1,
) -> list[ImageEval]:
    """Evaluate (pred, gt, tol, thresholds, thin_pred) tasks, optionally in a
    process pool. Results keep task order; each task is independent and pure."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_evaluate_one(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_one, tasks))


def _metrics_from_counts(n_pred: int, n_gt: int, n_matched: int) -> dict:
    p = 1.0 if n_pred == 0 else n_matched / n_pred
    r = 1.0 if n_gt == 0 else n_matched / n_gt
    return {"precision": p, "recall": r, "f1": f1_score(p, r)}


def aggregate(per_image: Sequence[ImageEval]) -> EvalSummary:
    """ODS (one threshold for the whole set) and OIS (per-image thresholds) rollup."""
    if not per_image:
        raise ValueError("nothing to aggregate")
    grids = {tuple(r.t for r in ev.rows) for ev in per_image}
    if len(grids) != 1:
        raise ValueError("images were evaluated on different threshold grids")
    ts = grids.pop()

    best = None
    for i, t in enumerate(ts):
        n_pred = sum(ev.rows[i].n_pred for ev in per_image)
        n_gt = sum(ev.rows[i].n_gt for ev in per_image)
        n_matched = sum(ev.rows[i].n_matched for ev in per_image)
        m = _metrics_from_counts(n_pred, n_gt, n_matched)
        if best is None or m["f1"] > best[1]["f1"]:
            best = (t, m)
    ods = {"t": best[0], **best[1]}

    picks = [ev.best_row() for ev in per_image]
    ois = _metrics_from_counts(
        sum(r.n_pred for r in picks),
        sum(r.n_gt for r in picks),
        sum(r.n_matched for r in picks),
    )
    return EvalSummary(ods=ods, ois=ois, per_image=tuple(per_image))


def summary_to_dict(s: EvalSummary) -> dict:
    return {
        "ods": s.ods,
        "ois": s.ois,
        "per_image": [
            {
                "image_id": ev.image_id,
                "rows": [
                    {"t": r.t, "n_pred": r.n_pred, "n_gt": r.n_gt, "n_matched": r.n_matched}
                    for r in ev.rows
                ],
            }
            for ev in s.per_image
        ],
    }


def write_summary_json(s: EvalSummary, path) -> None:
    with open(path, "w") as f:
        json.dump(summary_to_dict(s), f, indent=2)
        f.write("\n")


def write_pr_csv(s: EvalSummary, path) -> None:
    """Aggregated per-threshold precision/recall/F1 table."""
    ts = [r.t for r in s.per_image[0].rows]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["threshold", "n_pred", "n_gt", "n_matched", "precision", "recall", "f1"])
        for i, t in enumerate(ts):
            n_pred = sum(ev.rows[i].n_pred for ev in s.per_image)
            n_gt = sum(ev.rows[i].n_gt for ev in s.per_image)
            n_matched = sum(ev.rows[i].n_matched for ev in s.per_image)
            m = _metrics_from_counts(n_pred, n_gt, n_matched)
            w.writerow([t, n_pred, n_gt, n_matched, m["precision"], m["recall"], m["f1"]])
