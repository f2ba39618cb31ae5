"""Synthetic players for calibrating the automatic quality guard.

A tracer follows the reference contours with small jitter (a careful human);
a scribbler draws seeded random walks (a low-effort submission). Running both
through the game classifier measures how well the cut-off separates them.
"""

from __future__ import annotations

import numpy as np

from .game import GameParams, classify_submission, generate_field
from .raster import BinaryMap
from .strokes import Drawing, build_drawing, rasterize_drawing


def tracer_drawing(reference: Drawing, seed: int, jitter: float = 0.8) -> Drawing:
    """A faithful trace of the reference with Gaussian per-point jitter."""
    rng = np.random.default_rng(seed)
    raw = []
    for s in reference.strokes:
        pts = s.as_array() + rng.normal(0.0, jitter, size=(len(s.points), 2))
        raw.append((s.order_index, pts.tolist()))
    return build_drawing(reference.image_id, reference.width, reference.height, raw, "tracer")


def scribbler_drawing(
    image_id: str,
    width: int,
    height: int,
    seed: int,
    n_strokes: int = 8,
    points_per_stroke: int = 30,
    step: float = 12.0,
) -> Drawing:
    """Random-walk strokes with no regard for the image content."""
    rng = np.random.default_rng(seed)
    raw = []
    for k in range(n_strokes):
        x = rng.uniform(0, width)
        y = rng.uniform(0, height)
        pts = [(x, y)]
        heading = rng.uniform(0, 2 * np.pi)
        for _ in range(points_per_stroke - 1):
            heading += rng.normal(0.0, 0.6)
            x = float(np.clip(x + step * np.cos(heading), 0, width))
            y = float(np.clip(y + step * np.sin(heading), 0, height))
            pts.append((x, y))
        raw.append((k, pts))
    return build_drawing(image_id, width, height, raw, "scribbler")


def separation_experiment(
    reference: Drawing,
    params: GameParams = GameParams(),
    cutoff: float = 0.5,
    n_agents: int = 50,
    seed: int = 0,
) -> dict:
    """Classify n tracers and n scribblers against a field built from the reference.

    Returns per-population outcomes and the overall classification accuracy
    (tracers should be accepted, scribblers rejected).
    """
    boundary: BinaryMap = rasterize_drawing(reference, 1.0)
    field = generate_field(boundary, params, seed=seed, image_id=reference.image_id)

    tracer_results = []
    scribbler_results = []
    for k in range(n_agents):
        t = tracer_drawing(reference, seed=seed + 1000 + k)
        tracer_results.append(classify_submission(t, field, cutoff))
        s = scribbler_drawing(
            reference.image_id, reference.width, reference.height, seed=seed + 2000 + k
        )
        scribbler_results.append(classify_submission(s, field, cutoff))

    correct = sum(r["accepted"] for r in tracer_results) + sum(
        not r["accepted"] for r in scribbler_results
    )
    return {
        "accuracy": correct / (2 * n_agents),
        "tracer_accept_rate": sum(r["accepted"] for r in tracer_results) / n_agents,
        "scribbler_reject_rate": sum(not r["accepted"] for r in scribbler_results) / n_agents,
        "tracer_fractions": [r["fraction"] for r in tracer_results],
        "scribbler_fractions": [r["fraction"] for r in scribbler_results],
    }
