"""On-disk dataset layout.

    <root>/drawings/<image_id>/<k>.json   canonical drawing documents
    <root>/images/<image_id>.{png,jpg}    source photographs
    <root>/fields_src/<image_id>.png      precomputed boundary maps for the game
    <root>/submissions/submissions.jsonl  append-only game submissions
"""

from __future__ import annotations

import os
from pathlib import Path

from .strokes import Drawing, parse_drawing, serialize_drawing

ENV_DATA_ROOT = "CONTOURBENCH_DATA"


def resolve_data_root(configured: "str | Path | None") -> Path:
    """Dataset root; the CONTOURBENCH_DATA environment variable wins when set."""
    env = os.environ.get(ENV_DATA_ROOT)
    if env:
        return Path(env)
    if configured is None:
        raise ValueError(f"no dataset root given and {ENV_DATA_ROOT} is not set")
    return Path(configured)


def drawings_dir(root: Path) -> Path:
    return Path(root) / "drawings"


def images_dir(root: Path) -> Path:
    return Path(root) / "images"


def fields_dir(root: Path) -> Path:
    return Path(root) / "fields_src"


def submissions_path(root: Path) -> Path:
    return Path(root) / "submissions" / "submissions.jsonl"


def list_image_ids(root: Path) -> list[str]:
    d = drawings_dir(root)
    if not d.is_dir():
        return []
    return sorted(p.name for p in d.iterdir() if p.is_dir())


def load_drawings(root: Path, image_id: str) -> list[Drawing]:
    """All drawings for one image, ordered by filename."""
    d = drawings_dir(root) / image_id
    if not d.is_dir():
        raise FileNotFoundError(f"no drawings directory for image {image_id!r} under {root}")
    out = []
    for path in sorted(d.glob("*.json")):
        out.append(parse_drawing(path.read_text()))
    if not out:
        raise FileNotFoundError(f"no drawing documents for image {image_id!r} under {root}")
    return out


def save_drawing(root: Path, image_id: str, k: int, drawing: Drawing) -> Path:
    d = drawings_dir(root) / image_id
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{k}.json"
    path.write_text(serialize_drawing(drawing) + "\n")
    return path


def find_image_file(root: Path, image_id: str) -> "Path | None":
    for ext in (".png", ".jpg", ".jpeg"):
        p = images_dir(root) / f"{image_id}{ext}"
        if p.is_file():
            return p
    return None


def find_field_source(root: Path, image_id: str) -> "Path | None":
    p = fields_dir(root) / f"{image_id}.png"
    return p if p.is_file() else None
