"""Game service: session endpoints, live stroke scoring, JSONL persistence.

Clients only ever see redacted state (scores, counts, event flashes); reward
and penalty coordinates stay server-side. Submissions append to a JSONL log
that tolerates a truncated final line on reload.
"""

from __future__ import annotations

import itertools
import json
import threading
import zlib
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse
from pydantic import BaseModel

from . import dataset
from .consensus import consensus_drawings
from .game import (
    GameParams,
    GameSession,
    RewardField,
    finalize,
    generate_field,
    new_session,
    score_segment,
)
from .matching import Tolerance
from .raster import load_binarymap
from .strokes import Drawing, Point, drawing_to_dict, rasterize_drawing


@dataclass
class ServiceConfig:
    dataset_root: Path
    host: str = "127.0.0.1"
    port: int = 8008
    params: GameParams = dc_field(default_factory=GameParams)
    cutoff: float = 0.5
    static_dir: "Path | None" = None  # built browser client, served at /

    def __post_init__(self):
        self.dataset_root = Path(self.dataset_root)
        if not self.dataset_root.is_dir():
            raise ValueError(f"dataset root {self.dataset_root} does not exist")


@dataclass(frozen=True)
class SubmissionRecord:
    timestamp: str
    image_id: str
    session_id: str
    drawing: dict
    score_fraction: float
    status: str

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "image_id": self.image_id,
                "session_id": self.session_id,
                "drawing": self.drawing,
                "score_fraction": self.score_fraction,
                "status": self.status,
            },
            separators=(",", ":"),
        )


def load_submissions(path: Path) -> list[SubmissionRecord]:
    """Read all complete records; a truncated final line is skipped."""
    if not Path(path).is_file():
        return []
    out = []
    lines = Path(path).read_text().split("\n")
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            if i >= len(lines) - 2:  # interrupted final write
                continue
            raise
        out.append(
            SubmissionRecord(
                timestamp=doc["timestamp"],
                image_id=doc["image_id"],
                session_id=doc["session_id"],
                drawing=doc["drawing"],
                score_fraction=doc["score_fraction"],
                status=doc["status"],
            )
        )
    return out


class SessionRequest(BaseModel):
    image_id: str


class StrokePayload(BaseModel):
    points: list[tuple[float, float]]
    new_stroke: bool = False


def _redact_events(events) -> list[dict]:
    """Event flashes for the client: kind and value only, never coordinates."""
    return [{"kind": e.kind, "value": e.value} for e in events]


class GameService:
    """Shared mutable state behind the endpoints."""

    def __init__(self, cfg: ServiceConfig):
        self.cfg = cfg
        self.sessions: dict[str, GameSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.fields: dict[str, RewardField] = {}
        self.store_lock = threading.Lock()
        self.write_lock = threading.Lock()
        ids = dataset.list_image_ids(cfg.dataset_root)
        if not ids:
            raise ValueError(f"dataset at {cfg.dataset_root} has no images")
        self.image_cycle = itertools.cycle(ids)
        self.image_ids = ids

    def field_for(self, image_id: str) -> RewardField:
        with self.store_lock:
            if image_id in self.fields:
                return self.fields[image_id]
        src = dataset.find_field_source(self.cfg.dataset_root, image_id)
        if src is not None:
            boundary = load_binarymap(src)
        else:
            # fall back to the rasterized consensus of the image's drawings
            ds = dataset.load_drawings(self.cfg.dataset_root, image_id)
            if len(ds) >= 2:
                tol = Tolerance.for_image(ds[0].width, ds[0].height)
                gt = consensus_drawings(ds, tol).consensus_drawing
            else:
                gt = ds[0]
            boundary = rasterize_drawing(gt, 1.0)
        field = generate_field(
            boundary, self.cfg.params, seed=zlib.crc32(image_id.encode()), image_id=image_id
        )
        with self.store_lock:
            self.fields.setdefault(image_id, field)
            return self.fields[image_id]

    def open_session(self, image_id: str) -> GameSession:
        if image_id not in self.image_ids:
            raise KeyError(image_id)
        session = new_session(self.field_for(image_id))
        with self.store_lock:
            self.sessions[session.session_id] = session
            self.locks[session.session_id] = threading.Lock()
        return session

    def get_session(self, session_id: str) -> tuple[GameSession, threading.Lock]:
        with self.store_lock:
            if session_id not in self.sessions:
                raise KeyError(session_id)
            return self.sessions[session_id], self.locks[session_id]

    def record_submission(self, session: GameSession, fraction: float) -> None:
        path = dataset.submissions_path(self.cfg.dataset_root)
        path.parent.mkdir(parents=True, exist_ok=True)
        record = SubmissionRecord(
            timestamp=datetime.now(timezone.utc).isoformat(),
            image_id=session.image_id,
            session_id=session.session_id,
            drawing=drawing_to_dict(session.drawing()),
            score_fraction=fraction,
            status=session.status,
        )
        with self.write_lock:
            with open(path, "a") as f:
                f.write(record.to_json_line() + "\n")
                f.flush()


def create_app(cfg: ServiceConfig) -> FastAPI:
    service = GameService(cfg)
    app = FastAPI(title="contourbench game service")
    app.state.service = service

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/images/next")
    def next_image():
        image_id = next(service.image_cycle)
        return {"image_id": image_id, "image_url": f"/images/{image_id}"}

    @app.get("/images/{image_id}")
    def image_file(image_id: str):
        path = dataset.find_image_file(cfg.dataset_root, image_id)
        if path is None:
            raise HTTPException(status_code=404, detail=f"no image file for {image_id!r}")
        return FileResponse(path)

    @app.post("/session")
    def open_session(req: SessionRequest):
        try:
            session = service.open_session(req.image_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown image {req.image_id!r}")
        return {
            "session_id": session.session_id,
            "width": session.field.width,
            "height": session.field.height,
        }

    @app.get("/session/{session_id}")
    def session_state(session_id: str):
        try:
            session, lock = service.get_session(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        with lock:
            return session.snapshot(redacted=True)

    def _apply_stroke(session_id: str, payload: StrokePayload) -> dict:
        try:
            session, lock = service.get_session(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        points = [
            Point(
                min(max(x, 0.0), float(session.field.width)),
                min(max(y, 0.0), float(session.field.height)),
            )
            for x, y in payload.points
        ]
        with lock:
            try:
                result = score_segment(session, points, new_stroke=payload.new_stroke)
            except ValueError as e:
                raise HTTPException(status_code=409, detail=str(e))
            return {
                "delta": result.delta,
                "score": session.score,
                "events": _redact_events(result.events),
            }

    @app.post("/session/{session_id}/stroke")
    def post_stroke(session_id: str, payload: StrokePayload):
        return _apply_stroke(session_id, payload)

    @app.post("/session/{session_id}/submit")
    def submit(session_id: str):
        try:
            session, lock = service.get_session(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        with lock:
            try:
                verdict = finalize(session, cfg.cutoff)
            except ValueError as e:
                raise HTTPException(status_code=409, detail=str(e))
            service.record_submission(session, verdict.score_fraction)
            return {"status": verdict.status, "score_fraction": verdict.score_fraction}

    @app.websocket("/session/{session_id}/stream")
    async def stream(ws: WebSocket, session_id: str):
        await ws.accept()
        try:
            session, lock = service.get_session(session_id)
        except KeyError:
            await ws.send_json({"type": "error", "detail": "unknown session"})
            await ws.close()
            return
        try:
            while True:
                msg = await ws.receive_json()
                if msg.get("type") != "stroke_points":
                    await ws.send_json({"type": "error", "detail": "expected stroke_points"})
                    continue
                try:
                    payload = StrokePayload(
                        points=msg.get("points", []), new_stroke=bool(msg.get("new_stroke", False))
                    )
                except ValueError:
                    await ws.send_json({"type": "error", "detail": "bad stroke payload"})
                    continue
                points = [
                    Point(
                        min(max(float(x), 0.0), float(session.field.width)),
                        min(max(float(y), 0.0), float(session.field.height)),
                    )
                    for x, y in payload.points
                ]
                with lock:
                    try:
                        result = score_segment(session, points, new_stroke=payload.new_stroke)
                    except ValueError as e:
                        await ws.send_json({"type": "error", "detail": str(e)})
                        continue
                    reply = {
                        "type": "score",
                        "delta": result.delta,
                        "score": session.score,
                        "events": _redact_events(result.events),
                    }
                await ws.send_json(reply)
        except WebSocketDisconnect:
            return

    if cfg.static_dir is not None and Path(cfg.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        # registered last so API routes keep precedence
        app.mount("/", StaticFiles(directory=Path(cfg.static_dir), html=True), name="client")

    return app


def serve(cfg: ServiceConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="info")
