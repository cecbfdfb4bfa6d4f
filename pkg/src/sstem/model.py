"""Core value objects shared by every stage of the pipeline.

All types are immutable; instances can be shared freely across threads.
Manifest validation reports violations instead of raising so callers can
surface every problem at once.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

SPLIT_OPTIMIZATION = "optimization"
SPLIT_VALIDATION = "validation"
SPLIT_LABELS = (SPLIT_OPTIMIZATION, SPLIT_VALIDATION)

TEMPORAL_DIRECT = "direct"
TEMPORAL_PENALTY = "penalty"
TEMPORAL_FORMS = (TEMPORAL_DIRECT, TEMPORAL_PENALTY)

RATING_SCALE_MAX = 10


def frame_content_hash(image: np.ndarray) -> str:
    """SHA-256 digest of a frame's dimensions and raw pixel bytes."""
    h = hashlib.sha256()
    h.update(f"{image.shape[0]}x{image.shape[1]}x{image.shape[2]}:".encode("ascii"))
    h.update(np.ascontiguousarray(image).tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class VideoEntry:
    """One original/edited video pair and the prompt that produced the edit."""

    video_id: str
    original_path: str
    edited_path: str
    edit_prompt: str
    model_name: str

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "original_path": self.original_path,
            "edited_path": self.edited_path,
            "edit_prompt": self.edit_prompt,
            "model_name": self.model_name,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "VideoEntry":
        return cls(
            video_id=str(data["video_id"]),
            original_path=str(data["original_path"]),
            edited_path=str(data["edited_path"]),
            edit_prompt=str(data["edit_prompt"]),
            model_name=str(data["model_name"]),
        )


@dataclass(frozen=True)
class DatasetManifest:
    """Declarative description of the dataset and its optimization/validation split."""

    dataset_id: str
    videos: tuple[VideoEntry, ...]
    split: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "videos", tuple(self.videos))
        object.__setattr__(self, "split", dict(self.split))

    def entry(self, video_id: str) -> VideoEntry:
        for entry in self.videos:
            if entry.video_id == video_id:
                return entry
        raise KeyError(video_id)

    def video_ids(self) -> tuple[str, ...]:
        return tuple(entry.video_id for entry in self.videos)

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "videos": [entry.to_dict() for entry in self.videos],
            "split": dict(self.split),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DatasetManifest":
        return cls(
            dataset_id=str(data["dataset_id"]),
            videos=tuple(VideoEntry.from_dict(v) for v in data["videos"]),
            split={str(k): str(v) for k, v in dict(data.get("split", {})).items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def validate_manifest(manifest: DatasetManifest) -> list[str]:
    """Check every manifest invariant; return one message per violation.

    An empty list means the manifest is well formed. Messages name the
    offending field and video_id so they can be fixed without digging.
    """
    violations: list[str] = []
    seen: set[str] = set()
    for entry in manifest.videos:
        if not entry.video_id:
            violations.append("videos: entry with empty video_id")
            continue
        if entry.video_id in seen:
            violations.append(f"videos: duplicate video_id '{entry.video_id}'")
        seen.add(entry.video_id)
        if not entry.edit_prompt.strip():
            violations.append(f"videos[{entry.video_id}].edit_prompt: must be non-empty")
        if not entry.original_path:
            violations.append(f"videos[{entry.video_id}].original_path: must be non-empty")
        if not entry.edited_path:
            violations.append(f"videos[{entry.video_id}].edited_path: must be non-empty")

    counts = {label: 0 for label in SPLIT_LABELS}
    for video_id, label in manifest.split.items():
        if video_id not in seen:
            violations.append(f"split: unknown video_id '{video_id}'")
        if label not in SPLIT_LABELS:
            violations.append(f"split[{video_id}]: invalid partition '{label}'")
        else:
            counts[label] += 1
    if counts[SPLIT_OPTIMIZATION] == 0 and counts[SPLIT_VALIDATION] == 0:
        violations.append("split: no videos assigned to either partition")
    return violations


@dataclass(frozen=True, eq=False)
class Frame:
    """A single decoded frame: 8-bit RGB pixels plus a content digest.

    The pixel array is frozen (non-writeable) on construction. ``content_hash``
    is always recomputable from the pixels; two frames with identical pixels
    share one hash and therefore one cache slot per artifact kind.
    """

    index: int
    image: np.ndarray
    content_hash: str = ""

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("frame index must be non-negative")
        img = np.asarray(self.image)
        if img.ndim != 3 or img.shape[2] != 3:
            raise ValueError(f"frame image must be HxWx3, got shape {img.shape}")
        if img.shape[0] < 1 or img.shape[1] < 1:
            raise ValueError("frame image must have positive height and width")
        if img.dtype != np.uint8:
            raise ValueError(f"frame image must be 8-bit, got {img.dtype}")
        img = np.ascontiguousarray(img)
        img.setflags(write=False)
        object.__setattr__(self, "image", img)
        if not self.content_hash:
            object.__setattr__(self, "content_hash", frame_content_hash(img))

    @property
    def height(self) -> int:
        return int(self.image.shape[0])

    @property
    def width(self) -> int:
        return int(self.image.shape[1])


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Ordered frames sampled from one video."""

    video_id: str
    frames: tuple[Frame, ...]
    fps: float
    stride: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) < 1:
            raise ValueError("frame sequence must contain at least one frame")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.stride < 1:
            raise ValueError("stride must be a positive integer")
        indices = [f.index for f in self.frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("frame indices must be strictly increasing")

    @property
    def n_frames(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class StageScores:
    """The three per-video stage scores, each clamped to [0, 1]."""

    video_id: str
    s_similarity: float
    s_object: float
    s_temporal: float
    n_frames: int

    def __post_init__(self) -> None:
        for name in ("s_similarity", "s_object", "s_temporal"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.n_frames < 1:
            raise ValueError("n_frames must be at least 1")


@dataclass(frozen=True)
class WeightVector:
    """Aggregation weights for the three stage scores.

    ``temporal_form`` selects the third term: ``direct`` uses w3 * s_temporal,
    ``penalty`` uses w3 * (1 - s_temporal).
    """

    w1: float
    w2: float
    w3: float
    intercept: float = 0.0
    temporal_form: str = TEMPORAL_DIRECT

    def __post_init__(self) -> None:
        if self.temporal_form not in TEMPORAL_FORMS:
            raise ValueError(f"temporal_form must be one of {TEMPORAL_FORMS}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)

    def on_simplex(self, tol: float = 1e-9) -> bool:
        """True when weights are non-negative and sum to 1 within tol."""
        ws = self.as_tuple()
        return all(w >= -tol for w in ws) and abs(sum(ws) - 1.0) <= tol


@dataclass(frozen=True)
class HumanScoreRecord:
    """One rater's score for one video; resubmission replaces earlier records."""

    video_id: str
    rater_id: str
    raw_score: int
    normalized: float
    timestamp: str

    def __post_init__(self) -> None:
        if not isinstance(self.raw_score, int) or not (1 <= self.raw_score <= RATING_SCALE_MAX):
            raise ValueError(f"raw_score must be an integer in 1..{RATING_SCALE_MAX}")
        if self.normalized != self.raw_score / RATING_SCALE_MAX:
            raise ValueError("normalized must equal raw_score / 10 exactly")

    @classmethod
    def from_raw(cls, video_id: str, rater_id: str, raw_score: int, timestamp: str) -> "HumanScoreRecord":
        return cls(
            video_id=video_id,
            rater_id=rater_id,
            raw_score=raw_score,
            normalized=raw_score / RATING_SCALE_MAX,
            timestamp=timestamp,
        )


@dataclass(frozen=True)
class CorrelationRow:
    """Pearson/Spearman/Kendall coefficients of one metric against human scores."""

    pearson: float
    spearman: float
    kendall: float

    def __post_init__(self) -> None:
        for name in ("pearson", "spearman", "kendall"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            if not (-1.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [-1, 1], got {value}")


@dataclass(frozen=True)
class CorrelationTable:
    """Named correlation rows, preserving insertion order for rendering."""

    rows: dict[str, CorrelationRow]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", dict(self.rows))

    def metric_names(self) -> tuple[str, ...]:
        return tuple(self.rows)

    def to_dict(self) -> dict:
        return {
            name: {"pearson": row.pearson, "spearman": row.spearman, "kendall": row.kendall}
            for name, row in self.rows.items()
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CorrelationTable":
        return cls(
            rows={
                str(name): CorrelationRow(
                    pearson=float(vals["pearson"]),
                    spearman=float(vals["spearman"]),
                    kendall=float(vals["kendall"]),
                )
                for name, vals in data.items()
            }
        )


def mean_exact(values: Iterable[float]) -> float:
    """Correctly rounded arithmetic mean.

    Uses exact rational accumulation so that e.g. mean(0.8, 0.6, 0.7) is the
    float 0.7 rather than a one-ulp neighbour. Score averaging throughout the
    pipeline goes through this helper.
    """
    import statistics

    return float(statistics.mean(values))
