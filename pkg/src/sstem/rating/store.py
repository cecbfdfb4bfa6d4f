"""Durable storage for human ratings.

Records append to a JSONL log; the latest record per (video_id, rater_id)
wins, compacted on read. Appends hold a single writer lock while reads work
on immutable snapshots, so the store tolerates concurrent HTTP handlers
without a database.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import CacheIOError
from ..model import RATING_SCALE_MAX

LOG_FILENAME = "ratings.jsonl"


@dataclass(frozen=True)
class RatingRecord:
    """One rater's submission: three 1-10 axis scores plus derived fields."""

    video_id: str
    rater_id: str
    axes: tuple[int, int, int]
    raw_score: int
    normalized: float
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "rater_id": self.rater_id,
            "axes": list(self.axes),
            "raw_score": self.raw_score,
            "normalized": self.normalized,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RatingRecord":
        return cls(
            video_id=str(data["video_id"]),
            rater_id=str(data["rater_id"]),
            axes=tuple(int(v) for v in data["axes"]),
            raw_score=int(data["raw_score"]),
            normalized=float(data["normalized"]),
            timestamp=str(data["timestamp"]),
        )


def overall_raw_score(axes: tuple[int, int, int]) -> int:
    """Rounded mean of the three axis scores.

    The sum of three integers is never exactly half-way between multiples of
    three, so ordinary rounding is unambiguous here.
    """
    return round(sum(axes) / 3)


class RatingStore:
    """Append-only rating log with last-record-wins compaction."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheIOError(f"cannot create store directory {self.directory}: {exc}") from exc
        self.log_path = self.directory / LOG_FILENAME
        self._write_lock = threading.Lock()
        self._latest: dict[tuple[str, str], RatingRecord] = {}
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        latest: dict[tuple[str, str], RatingRecord] = {}
        for line in self.log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = RatingRecord.from_dict(json.loads(line))
            latest[(record.video_id, record.rater_id)] = record
        self._latest = latest

    def append(self, record: RatingRecord) -> None:
        """Persist a record; replaces any earlier one by the same rater."""
        if record.raw_score < 1 or record.raw_score > RATING_SCALE_MAX:
            raise ValueError("raw_score outside the rating scale")
        line = json.dumps(record.to_dict(), sort_keys=True)
        with self._write_lock:
            try:
                with self.log_path.open("a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()
            except OSError as exc:
                raise CacheIOError(f"failed to append rating record: {exc}") from exc
            updated = dict(self._latest)
            updated[(record.video_id, record.rater_id)] = record
            self._latest = updated

    def snapshot(self) -> dict[tuple[str, str], RatingRecord]:
        """Immutable view of the latest record per (video, rater)."""
        return self._latest

    def records_for_video(self, video_id: str) -> list[RatingRecord]:
        return [rec for (vid, _), rec in self.snapshot().items() if vid == video_id]

    def raters_for_video(self, video_id: str) -> set[str]:
        return {rater for (vid, rater) in self.snapshot() if vid == video_id}

    def videos_rated_by(self, rater_id: str) -> set[str]:
        return {vid for (vid, rater) in self.snapshot() if rater == rater_id}
