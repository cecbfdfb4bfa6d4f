"""Video decoding, frame-prompt pairing, and the on-disk inference cache.

Frames are always decoded to 8-bit RGB so every backend sees one pixel
contract. The cache is content-addressed: entries are keyed by the frame's
pixel hash, the artifact kind, and the producing backend's identity, so
swapping models invalidates naturally and identical frames share slots.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import cv2

from .backends.base import BackendId
from .errors import CacheIOError, EmptyVideoError, IdMismatchError, UnreadableVideoError
from .model import Frame, FrameSequence, VideoEntry

DEFAULT_FPS = 30.0


def extract_frames(entry: VideoEntry, stride: int = 1) -> FrameSequence:
    """Decode the edited video, keeping every stride-th frame.

    Kept frames carry their source indices (0, stride, 2*stride, ...), so a
    16-frame clip at stride 4 yields indices 0, 4, 8, 12.
    """
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    path = Path(entry.edited_path)
    if not path.is_file():
        raise UnreadableVideoError(f"video file not found: {path}")
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise UnreadableVideoError(f"could not open video: {path}")
    try:
        fps = capture.get(cv2.CAP_PROP_FPS)
        frames: list[Frame] = []
        index = 0
        while True:
            ok, bgr = capture.read()
            if not ok:
                break
            if index % stride == 0:
                rgb = cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)
                frames.append(Frame(index=index, image=rgb))
            index += 1
    finally:
        capture.release()
    if not frames:
        raise EmptyVideoError(f"decoder produced no frames for: {path}")
    return FrameSequence(
        video_id=entry.video_id,
        frames=tuple(frames),
        fps=fps if fps and fps > 0 else DEFAULT_FPS,
        stride=stride,
    )


def pair_with_prompt(seq: FrameSequence, entry: VideoEntry) -> list[tuple[Frame, str]]:
    """One (frame, edit_prompt) pair per frame."""
    if seq.video_id != entry.video_id:
        raise IdMismatchError(
            f"sequence is for '{seq.video_id}' but entry is '{entry.video_id}'"
        )
    return [(frame, entry.edit_prompt) for frame in seq.frames]


@dataclass(frozen=True)
class CacheEntry:
    """One stored inference artifact."""

    content_hash: str
    artifact_kind: str
    backend_slug: str
    payload: bytes
    created_at: float


class FrameCache:
    """Content-addressed store for per-frame inference artifacts.

    Layout: one file per entry named ``<content_hash>-<kind>-<backend_slug>``.
    Writes go through a temp file and an atomic rename, so concurrent writers
    of the same key (whose payloads are identical by construction) settle on
    last-write-wins without torn files.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheIOError(f"cannot create cache directory {self.root}: {exc}") from exc

    def _path(self, content_hash: str, artifact_kind: str, backend_id: BackendId) -> Path:
        if not content_hash or not artifact_kind:
            raise ValueError("cache key fields must be non-empty")
        return self.root / f"{content_hash}-{artifact_kind}-{backend_id.slug()}"

    def get(self, content_hash: str, artifact_kind: str, backend_id: BackendId) -> bytes | None:
        """Cached payload, or None when the key is absent."""
        path = self._path(content_hash, artifact_kind, backend_id)
        if not path.exists():
            return None
        try:
            return path.read_bytes()
        except OSError as exc:
            raise CacheIOError(f"cache read failed for {path}: {exc}") from exc

    def put(self, content_hash: str, artifact_kind: str, backend_id: BackendId, payload: bytes) -> None:
        path = self._path(content_hash, artifact_kind, backend_id)
        try:
            fd, tmp_name = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as handle:
                    handle.write(payload)
                os.replace(tmp_name, path)
            except BaseException:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise
        except OSError as exc:
            raise CacheIOError(f"cache write failed for {path}: {exc}") from exc

    def entries(self) -> list[CacheEntry]:
        """All stored entries; intended for diagnostics, not hot paths."""
        found = []
        for path in sorted(self.root.iterdir()):
            if path.name.startswith(".tmp-") or not path.is_file():
                continue
            content_hash, kind, slug = path.name.split("-", 2)
            found.append(
                CacheEntry(
                    content_hash=content_hash,
                    artifact_kind=kind,
                    backend_slug=slug,
                    payload=path.read_bytes(),
                    created_at=path.stat().st_mtime,
                )
            )
        return found


def cached_call(
    cache: FrameCache | None,
    content_hash: str,
    artifact_kind: str,
    backend_id: BackendId,
    compute,
    encode,
    decode,
):
    """Fetch-or-compute helper: byte-identical to recomputation by contract."""
    if cache is not None:
        stored = cache.get(content_hash, artifact_kind, backend_id)
        if stored is not None:
            return decode(stored)
    value = compute()
    if cache is not None:
        cache.put(content_hash, artifact_kind, backend_id, encode(value))
    return value
