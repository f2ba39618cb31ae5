"""Synthetic demo dataset: geometric "contours" plus five jittered annotators.

Useful for exercising the CLI, the benchmark, and the game service without the
real crowd-sourced data.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image

from .dataset import fields_dir, images_dir, save_drawing
from .raster import save_binarymap
from .strokes import Drawing, build_drawing, rasterize_drawing

N_ANNOTATORS = 5


def _shape_strokes(kind: int, w: int, h: int) -> list[list[tuple[float, float]]]:
    cx, cy = w / 2, h / 2
    if kind == 0:
        box = [(0.2 * w, 0.2 * h), (0.8 * w, 0.2 * h), (0.8 * w, 0.65 * h), (0.2 * w, 0.65 * h), (0.2 * w, 0.2 * h)]
        ground = [(0.05 * w, 0.85 * h), (0.95 * w, 0.85 * h)]
        door = [(0.45 * w, 0.65 * h), (0.45 * w, 0.4 * h), (0.55 * w, 0.4 * h), (0.55 * w, 0.65 * h)]
        window = [(0.27 * w, 0.3 * h), (0.38 * w, 0.3 * h), (0.38 * w, 0.45 * h), (0.27 * w, 0.45 * h), (0.27 * w, 0.3 * h)]
        return [box, ground, door, window]
    if kind == 1:
        circle = [
            (cx + 0.3 * w * math.cos(t), cy * 0.8 + 0.3 * h * math.sin(t))
            for t in np.linspace(0, 2 * math.pi, 24)
        ]
        stem = [(cx, cy * 0.8 + 0.3 * h), (cx, 0.95 * h)]
        ray_l = [(0.1 * w, 0.1 * h), (cx - 0.32 * w * 0.707, cy * 0.8 - 0.32 * h * 0.707)]
        ray_r = [(0.9 * w, 0.1 * h), (cx + 0.32 * w * 0.707, cy * 0.8 - 0.32 * h * 0.707)]
        horizon = [(0.05 * w, 0.9 * h), (0.95 * w, 0.9 * h)]
        return [circle, stem, ray_l, ray_r, horizon]
    wave = [(0.05 * w + i * 0.9 * w / 19, cy + 0.18 * h * math.sin(i * 0.8)) for i in range(20)]
    roof = [(0.1 * w, 0.35 * h), (0.5 * w, 0.1 * h), (0.9 * w, 0.35 * h)]
    wall_l = [(0.18 * w, 0.31 * h), (0.18 * w, 0.52 * h)]
    wall_r = [(0.82 * w, 0.31 * h), (0.82 * w, 0.52 * h)]
    return [wave, roof, wall_l, wall_r]


def demo_drawing(image_id: str, kind: int, w: int, h: int, annotator: int, rng) -> Drawing:
    """One annotator's take: the shared shapes with per-annotator jitter."""
    raw = []
    for k, pts in enumerate(_shape_strokes(kind, w, h)):
        arr = np.array(pts) + rng.normal(0.0, 1.2, size=(len(pts), 2))
        raw.append((k, arr.tolist()))
    return build_drawing(image_id, w, h, raw, f"annotator-{annotator}")


def _render_image(d: Drawing, path: Path) -> None:
    """A fake 'photo': the contours blurred onto a light background."""
    m = rasterize_drawing(d, 1.0)
    arr = np.full((d.height, d.width), 235, dtype=np.uint8)
    arr[m.pixels] = 60
    img = Image.fromarray(arr, mode="L").convert("RGB")
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path)


def build_demo_dataset(
    root: "str | Path", n_images: int = 2, size: tuple[int, int] = (240, 200), seed: int = 0
) -> list[str]:
    """Create drawings/, images/, and fields_src/ under root. Returns image ids."""
    root = Path(root)
    w, h = size
    rng = np.random.default_rng(seed)
    ids = []
    for i in range(n_images):
        image_id = f"demo{i:03d}"
        ids.append(image_id)
        base = None
        for a in range(N_ANNOTATORS):
            d = demo_drawing(image_id, i % 3, w, h, a, rng)
            save_drawing(root, image_id, a, d)
            if base is None:
                base = d
        _render_image(base, images_dir(root) / f"{image_id}.png")
        fields_dir(root).mkdir(parents=True, exist_ok=True)
        save_binarymap(rasterize_drawing(base, 1.0), fields_dir(root) / f"{image_id}.png")
    return ids
