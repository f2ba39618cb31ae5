"""Drawing-game scoring: hidden reward/penalty fields and live stroke scoring.

Reward points are sampled on the boundary map, penalty points well clear of
it. A session accrues score as strokes pass near reward points (each fires
once); the final score fraction against a cut-off decides acceptance.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, field, asdict
from typing import Iterable, Sequence

import numpy as np

from .raster import BinaryMap, SoftMap, distance_transform, threshold
from .strokes import Drawing, Point, Stroke

DENSIFY_STEP = 1.0  # px between proximity samples, so fast strokes cannot tunnel


@dataclass(frozen=True)
class GameParams:
    n_reward: int = 50
    n_penalty: int = 50
    collect_radius: float = 6.0
    penalty_radius: float = 4.0
    clearance: float = 15.0
    min_sep: float = 8.0
    reward_value: float = 1.0
    penalty_value: float = 0.5
    boundary_t: float = 0.5

    def __post_init__(self):
        if self.n_reward < 1:
            raise ValueError("need at least one reward point")
        if self.n_penalty < 0:
            raise ValueError("n_penalty cannot be negative")
        for name in ("collect_radius", "penalty_radius", "clearance", "reward_value", "penalty_value"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_sep < 0:
            raise ValueError("min_sep cannot be negative")


@dataclass(frozen=True)
class RewardField:
    """Hidden scoring field for one image."""

    image_id: str
    width: int
    height: int
    reward_points: tuple[tuple[Point, float], ...]
    penalty_points: tuple[tuple[Point, float], ...]
    params: GameParams
    seed: int

    @property
    def total_reward(self) -> float:
        return math.fsum(v for _, v in self.reward_points)

    def to_dict(self) -> dict:
        """Full server-side form, including the hidden coordinates."""
        return {
            "image_id": self.image_id,
            "width": self.width,
            "height": self.height,
            "reward_points": [{"x": p.x, "y": p.y, "value": v} for p, v in self.reward_points],
            "penalty_points": [{"x": p.x, "y": p.y, "value": v} for p, v in self.penalty_points],
            "params": asdict(self.params),
            "seed": self.seed,
            "total_reward": self.total_reward,
        }


def field_from_dict(doc: dict) -> RewardField:
    params = GameParams(**doc["params"])
    return RewardField(
        image_id=doc["image_id"],
        width=int(doc["width"]),
        height=int(doc["height"]),
        reward_points=tuple(
            (Point(p["x"], p["y"]), float(p["value"])) for p in doc["reward_points"]
        ),
        penalty_points=tuple(
            (Point(p["x"], p["y"]), float(p["value"])) for p in doc["penalty_points"]
        ),
        params=params,
        seed=int(doc["seed"]),
    )


def generate_field(
    boundary: "BinaryMap | SoftMap",
    params: GameParams = GameParams(),
    seed: int = 0,
    image_id: str = "",
) -> RewardField:
    """Sample reward points on the boundary and penalty points far from it.

    Deterministic for a given seed. Reward points keep pairwise separation
    >= min_sep (greedy over a seeded shuffle); penalty points are drawn from
    pixels whose exact Euclidean distance to the boundary is >= clearance.
    """
    if isinstance(boundary, SoftMap):
        boundary = threshold(boundary, params.boundary_t)
    coords = boundary.coords()
    if len(coords) < params.n_reward:
        raise ValueError(
            f"boundary has {len(coords)} on-pixels, fewer than n_reward={params.n_reward}"
        )
    rng = np.random.default_rng(seed)

    order = rng.permutation(len(coords))
    chosen: list[tuple[int, int]] = []
    min_sep_sq = params.min_sep**2
    for i in order:
        x, y = int(coords[i, 0]), int(coords[i, 1])
        if all((x - cx) ** 2 + (y - cy) ** 2 >= min_sep_sq for cx, cy in chosen):
            chosen.append((x, y))
            if len(chosen) == params.n_reward:
                break
    if len(chosen) < params.n_reward:
        raise ValueError(
            f"could not place {params.n_reward} reward points with min_sep={params.min_sep}; "
            f"managed {len(chosen)}"
        )
    rewards = tuple((Point(float(x), float(y)), params.reward_value) for x, y in chosen)

    penalties: tuple[tuple[Point, float], ...] = ()
    if params.n_penalty > 0:
        dist = distance_transform(boundary)
        ys, xs = np.nonzero(dist >= params.clearance)
        if len(xs) < params.n_penalty:
            raise ValueError(
                f"only {len(xs)} pixels have clearance >= {params.clearance}; "
                f"cannot place {params.n_penalty} penalty points"
            )
        pick = rng.choice(len(xs), size=params.n_penalty, replace=False)
        penalties = tuple(
            (Point(float(xs[i]), float(ys[i])), params.penalty_value) for i in pick
        )
    return RewardField(image_id, boundary.width, boundary.height, rewards, penalties, params, seed)


@dataclass(frozen=True)
class ScoreEvent:
    kind: str  # "reward" | "penalty"
    index: int  # index into the field's point list; stripped before reaching clients
    value: float


@dataclass(frozen=True)
class SegmentScore:
    delta: float
    events: tuple[ScoreEvent, ...]


@dataclass
class GameSession:
    """Live scoring state for one drawing attempt. Single-writer."""

    session_id: str
    field: RewardField
    collected: set[int] = field(default_factory=set)
    triggered: set[int] = field(default_factory=set)
    score: float = 0.0
    status: str = "open"
    strokes: list[list[Point]] = field(default_factory=list)

    @property
    def image_id(self) -> str:
        return self.field.image_id

    def drawing(self) -> Drawing:
        """The accumulated strokes as a Drawing; isolated dots are dropped."""
        raw = []
        order = 0
        for pts in self.strokes:
            deduped = [pts[0]]
            for p in pts[1:]:
                if p != deduped[-1]:
                    deduped.append(p)
            if len(deduped) >= 2:
                raw.append(Stroke(tuple(deduped), order))
                order += 1
        return Drawing(self.field.image_id, self.field.width, self.field.height, tuple(raw))

    def snapshot(self, redacted: bool = True) -> dict:
        """JSON-ready state; the redacted form never carries field coordinates."""
        base = {
            "session_id": self.session_id,
            "image_id": self.image_id,
            "score": self.score,
            "collected_count": len(self.collected),
            "triggered_count": len(self.triggered),
            "total_reward": self.field.total_reward,
            "status": self.status,
        }
        if not redacted:
            base["field"] = self.field.to_dict()
            base["collected"] = sorted(self.collected)
            base["triggered"] = sorted(self.triggered)
        return base


def new_session(field_: RewardField, session_id: str | None = None) -> GameSession:
    return GameSession(session_id=session_id or uuid.uuid4().hex, field=field_)


def _densify(points: list[Point]) -> np.ndarray:
    """Samples along the polyline at most DENSIFY_STEP apart, endpoints included."""
    if len(points) == 1:
        return np.array([[points[0].x, points[0].y]])
    samples = [np.array([[points[0].x, points[0].y]])]
    for a, b in zip(points, points[1:]):
        seg = math.hypot(b.x - a.x, b.y - a.y)
        n = max(1, math.ceil(seg / DENSIFY_STEP))
        t = np.arange(1, n + 1) / n
        samples.append(
            np.column_stack([a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t])
        )
    return np.concatenate(samples)


def score_segment(
    s: GameSession, new_points: Sequence[Point], new_stroke: bool = False
) -> SegmentScore:
    """Score a batch of stroke points and fold them into the session.

    Continuation batches are joined to the previous point of the current
    stroke, so scoring does not depend on how a stroke is chunked. Every
    reward/penalty point fires at most once per session.
    """
    if s.status != "open":
        raise ValueError(f"session is {s.status}, not open")
    pts = [Point(p.x, p.y) if not isinstance(p, Point) else p for p in new_points]
    if not pts:
        raise ValueError("empty point batch")

    if new_stroke or not s.strokes:
        s.strokes.append(list(pts))
        path = pts
    else:
        path = [s.strokes[-1][-1], *pts]
        s.strokes[-1].extend(pts)

    samples = _densify(path)
    events: list[ScoreEvent] = []
    delta = 0.0
    collect_r2 = s.field.params.collect_radius**2
    penalty_r2 = s.field.params.penalty_radius**2

    # walk samples in order so events come out in travel order
    reward_xy = np.array([[p.x, p.y] for p, _ in s.field.reward_points]).reshape(-1, 2)
    penalty_xy = np.array([[p.x, p.y] for p, _ in s.field.penalty_points]).reshape(-1, 2)
    for sx, sy in samples:
        if len(reward_xy):
            d2 = (reward_xy[:, 0] - sx) ** 2 + (reward_xy[:, 1] - sy) ** 2
            for idx in np.nonzero(d2 <= collect_r2)[0]:
                i = int(idx)
                if i not in s.collected:
                    s.collected.add(i)
                    value = s.field.reward_points[i][1]
                    delta += value
                    events.append(ScoreEvent("reward", i, value))
        if len(penalty_xy):
            d2 = (penalty_xy[:, 0] - sx) ** 2 + (penalty_xy[:, 1] - sy) ** 2
            for idx in np.nonzero(d2 <= penalty_r2)[0]:
                i = int(idx)
                if i not in s.triggered:
                    s.triggered.add(i)
                    value = s.field.penalty_points[i][1]
                    delta -= value
                    events.append(ScoreEvent("penalty", i, value))
    s.score += delta
    return SegmentScore(delta, tuple(events))


@dataclass(frozen=True)
class Verdict:
    status: str  # "accepted" | "rejected"
    score_fraction: float


def finalize(s: GameSession, cutoff: float = 0.5) -> Verdict:
    """Close the session and convert the score into an accept/reject decision."""
    if s.status != "open":
        raise ValueError(f"session already {s.status}")
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must lie in (0, 1], got {cutoff}")
    fraction = max(s.score, 0.0) / s.field.total_reward
    s.status = "accepted" if fraction >= cutoff else "rejected"
    return Verdict(s.status, fraction)


def classify_submission(d: Drawing, field_: RewardField, cutoff: float = 0.5) -> dict:
    """Batch-replay a finished drawing through a fresh session and finalize it."""
    if (d.width, d.height) != (field_.width, field_.height):
        raise ValueError(
            f"drawing is {d.width}x{d.height} but the field covers "
            f"{field_.width}x{field_.height}"
        )
    session = new_session(field_)
    for stroke in d.strokes:
        score_segment(session, stroke.points, new_stroke=True)
    verdict = finalize(session, cutoff)
    return {"accepted": verdict.status == "accepted", "fraction": verdict.score_fraction}
