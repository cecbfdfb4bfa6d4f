"""HTTP layer over the rating service.

Endpoints:
    GET  /api/health
    GET  /api/tasks/next?rater=...&dataset=...
    POST /api/ratings
    GET  /api/aggregates
    GET  /api/media/{video_id}/{original|edited}   (supports Range requests)

When a UI directory is supplied, its static bundle is served at /.
"""

from __future__ import annotations

import re
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import EvalError, OutOfRangeError, UnknownDatasetError, UnknownVideoError
from .service import RatingService, guess_media_type

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)$")


class RatingSubmission(BaseModel):
    rater_id: str
    video_id: str
    semantic_accuracy: int = Field(ge=-1000, le=1000)
    spatial_coherence: int = Field(ge=-1000, le=1000)
    temporal_consistency: int = Field(ge=-1000, le=1000)


def _error_response(exc: EvalError, status: int) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": exc.code, "detail": str(exc)})


def _range_slice(header: str, size: int) -> tuple[int, int] | None:
    match = _RANGE_RE.match(header.strip())
    if not match:
        return None
    start_text, end_text = match.groups()
    if not start_text and not end_text:
        return None
    if not start_text:
        # suffix range: last N bytes
        length = int(end_text)
        if length == 0:
            return None
        start = max(0, size - length)
        end = size - 1
    else:
        start = int(start_text)
        end = int(end_text) if end_text else size - 1
    if start >= size or end < start:
        return None
    return start, min(end, size - 1)


def create_app(service: RatingService, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="rating-service")

    @app.exception_handler(OutOfRangeError)
    async def _out_of_range(_req: Request, exc: OutOfRangeError):
        return _error_response(exc, 400)

    @app.exception_handler(UnknownVideoError)
    async def _unknown_video(_req: Request, exc: UnknownVideoError):
        return _error_response(exc, 404)

    @app.exception_handler(UnknownDatasetError)
    async def _unknown_dataset(_req: Request, exc: UnknownDatasetError):
        return _error_response(exc, 404)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "dataset_id": service.manifest.dataset_id}

    @app.get("/api/tasks/next")
    def next_task(rater: str = Query(min_length=1), dataset: str | None = None):
        task = service.next_task(rater, dataset_id=dataset)
        return {"task": task.to_dict() if task else None}

    @app.post("/api/ratings")
    def submit(body: RatingSubmission):
        record = service.submit_rating(
            body.rater_id,
            body.video_id,
            (body.semantic_accuracy, body.spatial_coherence, body.temporal_consistency),
        )
        return {
            "video_id": record.video_id,
            "rater_id": record.rater_id,
            "raw_score": record.raw_score,
            "normalized": record.normalized,
            "timestamp": record.timestamp,
        }

    @app.get("/api/aggregates")
    def aggregates():
        return {"aggregates": [a.to_dict() for a in service.aggregates()]}

    @app.get("/api/media/{video_id}/{which}")
    def media(video_id: str, which: str, request: Request):
        path = service.media_path(video_id, which)
        if not path.is_file():
            raise UnknownVideoError(f"media file missing on disk: {path}")
        data = path.read_bytes()
        media_type = guess_media_type(path)
        range_header = request.headers.get("range")
        if range_header:
            piece = _range_slice(range_header, len(data))
            if piece is None:
                return Response(
                    status_code=416,
                    headers={"Content-Range": f"bytes */{len(data)}"},
                )
            start, end = piece
            return Response(
                content=data[start : end + 1],
                status_code=206,
                media_type=media_type,
                headers={
                    "Content-Range": f"bytes {start}-{end}/{len(data)}",
                    "Accept-Ranges": "bytes",
                },
            )
        return Response(content=data, media_type=media_type, headers={"Accept-Ranges": "bytes"})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return {
                "service": "rating-service",
                "dataset_id": service.manifest.dataset_id,
                "endpoints": [
                    "/api/health",
                    "/api/tasks/next?rater=...",
                    "/api/ratings",
                    "/api/aggregates",
                    "/api/media/{video_id}/{original|edited}",
                ],
            }

    return app
