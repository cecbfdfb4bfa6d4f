"""Rating service: task assignment, score intake, and per-video aggregates.

Raters judge each video on three axes (semantic accuracy, spatial coherence,
temporal consistency), each an integer 1-10. The overall raw score is the
rounded mean of the axes and is normalized by /10; aggregates average the
latest normalized score per rater. Task assignment is least-rated-first so
coverage stays balanced across the dataset.
"""

from __future__ import annotations

import mimetypes
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import OutOfRangeError, UnknownDatasetError, UnknownVideoError
from ..model import (
    RATING_SCALE_MAX,
    DatasetManifest,
    HumanScoreRecord,
    mean_exact,
)
from ..reporting import human_csv_bytes, write_atomic
from .store import RatingRecord, RatingStore, overall_raw_score

RUBRIC_AXES = (
    {
        "key": "semantic_accuracy",
        "title": "Semantic accuracy",
        "description": "How faithfully does the edited video realize the edit prompt?",
    },
    {
        "key": "spatial_coherence",
        "title": "Spatial coherence",
        "description": "Are edited objects and the surrounding scene spatially consistent within frames?",
    },
    {
        "key": "temporal_consistency",
        "title": "Temporal consistency",
        "description": "Do edits stay stable and smooth across consecutive frames?",
    },
)


@dataclass(frozen=True)
class RatingTask:
    """One assignment handed to a rater."""

    task_id: str
    video_id: str
    original_media_url: str
    edited_media_url: str
    edit_prompt: str
    rubric: tuple[dict, ...] = RUBRIC_AXES

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "video_id": self.video_id,
            "original_media_url": self.original_media_url,
            "edited_media_url": self.edited_media_url,
            "edit_prompt": self.edit_prompt,
            "rubric": [dict(axis) for axis in self.rubric],
        }


@dataclass(frozen=True)
class AggregateScore:
    """Per-video mean of the latest normalized score per rater."""

    video_id: str
    mean_normalized: float
    n_raters: int
    per_axis: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "mean_normalized": self.mean_normalized,
            "n_raters": self.n_raters,
            "per_axis": list(self.per_axis),
        }


class RatingService:
    """Domain operations behind the HTTP endpoints."""

    def __init__(self, manifest: DatasetManifest, store: RatingStore):
        self.manifest = manifest
        self.store = store
        self._video_ids = set(manifest.video_ids())

    def _check_dataset(self, dataset_id: str | None) -> None:
        if dataset_id is not None and dataset_id != self.manifest.dataset_id:
            raise UnknownDatasetError(
                f"this service hosts '{self.manifest.dataset_id}', not '{dataset_id}'"
            )

    def next_task(self, rater_id: str, dataset_id: str | None = None) -> RatingTask | None:
        """Least-rated unrated video for this rater, or None when done."""
        if not rater_id or not rater_id.strip():
            raise ValueError("rater_id must be non-empty")
        self._check_dataset(dataset_id)
        rated = self.store.videos_rated_by(rater_id)
        candidates = [vid for vid in self.manifest.video_ids() if vid not in rated]
        if not candidates:
            return None
        video_id = min(candidates, key=lambda vid: (len(self.store.raters_for_video(vid)), vid))
        entry = self.manifest.entry(video_id)
        return RatingTask(
            task_id=f"{self.manifest.dataset_id}:{video_id}",
            video_id=video_id,
            original_media_url=f"/api/media/{video_id}/original",
            edited_media_url=f"/api/media/{video_id}/edited",
            edit_prompt=entry.edit_prompt,
        )

    def submit_rating(
        self, rater_id: str, video_id: str, axes: tuple[int, int, int]
    ) -> HumanScoreRecord:
        """Persist one rating; resubmission by the same rater replaces."""
        if not rater_id or not rater_id.strip():
            raise ValueError("rater_id must be non-empty")
        if video_id not in self._video_ids:
            raise UnknownVideoError(f"video '{video_id}' is not in dataset '{self.manifest.dataset_id}'")
        axes = tuple(axes)
        if len(axes) != 3 or any(not isinstance(v, int) or isinstance(v, bool) for v in axes):
            raise OutOfRangeError(f"expected three integer axis scores, got {axes!r}")
        if any(v < 1 or v > RATING_SCALE_MAX for v in axes):
            raise OutOfRangeError(f"axis scores must lie in 1..{RATING_SCALE_MAX}, got {axes!r}")
        raw = overall_raw_score(axes)
        record = RatingRecord(
            video_id=video_id,
            rater_id=rater_id,
            axes=axes,
            raw_score=raw,
            normalized=raw / RATING_SCALE_MAX,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        self.store.append(record)
        return HumanScoreRecord(
            video_id=video_id,
            rater_id=rater_id,
            raw_score=raw,
            normalized=raw / RATING_SCALE_MAX,
            timestamp=record.timestamp,
        )

    def aggregates(self) -> list[AggregateScore]:
        """One aggregate per video with at least one rating, sorted by id."""
        results = []
        for video_id in self.manifest.video_ids():
            records = self.store.records_for_video(video_id)
            if not records:
                continue
            results.append(
                AggregateScore(
                    video_id=video_id,
                    mean_normalized=mean_exact([r.normalized for r in records]),
                    n_raters=len(records),
                    per_axis=tuple(
                        mean_exact([float(r.axes[i]) for r in records]) for i in range(3)
                    ),
                )
            )
        return results

    def export_human_scores(self, path) -> None:
        """Write (video_id, mean_normalized, n_raters) rows for weight fitting."""
        rows = [(a.video_id, a.mean_normalized, a.n_raters) for a in self.aggregates()]
        write_atomic(path, human_csv_bytes(rows))

    def media_path(self, video_id: str, which: str) -> Path:
        if video_id not in self._video_ids:
            raise UnknownVideoError(f"video '{video_id}' is not in this dataset")
        if which not in ("original", "edited"):
            raise UnknownVideoError(f"media variant must be 'original' or 'edited', got '{which}'")
        entry = self.manifest.entry(video_id)
        return Path(entry.original_path if which == "original" else entry.edited_path)


def guess_media_type(path: Path) -> str:
    guessed, _ = mimetypes.guess_type(str(path))
    return guessed or "application/octet-stream"
