"""Contracts for the five model capabilities the pipeline consumes.

A backend is identified by (kind, name, version); that triple keys cached
inference artifacts, so any behavioural change must bump name or version.
"""

from __future__ import annotations

import abc
import re
from dataclasses import dataclass

import numpy as np

from ..model import Frame

KIND_CAPTIONER = "captioner"
KIND_TEXT_EMBEDDER = "text_embedder"
KIND_OBJECT_EXTRACTOR = "object_extractor"
KIND_DETECTOR = "detector"
KIND_FRAME_EMBEDDER = "frame_embedder"
BACKEND_KINDS = (
    KIND_CAPTIONER,
    KIND_TEXT_EMBEDDER,
    KIND_OBJECT_EXTRACTOR,
    KIND_DETECTOR,
    KIND_FRAME_EMBEDDER,
)

_SLUG_UNSAFE = re.compile(r"[^A-Za-z0-9._]+")


@dataclass(frozen=True)
class BackendId:
    """Identity triple for one backend; behaviour must be a pure function of it."""

    kind: str
    name: str
    version: str

    def __post_init__(self) -> None:
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind '{self.kind}'")
        if not self.name or not self.version:
            raise ValueError("backend name and version must be non-empty")

    def slug(self) -> str:
        """Filesystem-safe identifier used in cache filenames."""
        raw = f"{self.kind}.{self.name}.{self.version}"
        return _SLUG_UNSAFE.sub("-", raw)


@dataclass(frozen=True)
class Detection:
    """One detected object: label, confidence, and a normalized box."""

    label: str
    confidence: float
    box: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")
        x0, y0, x1, y1 = self.box
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"box corners must satisfy x0<x1 and y0<y1, got {self.box}")
        if not all(0.0 <= v <= 1.0 for v in self.box):
            raise ValueError(f"box coordinates must be normalized to [0, 1], got {self.box}")


@dataclass(frozen=True, eq=False)
class Embedding:
    """Fixed-length real vector produced by an embedding backend."""

    vector: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        vec = np.asarray(self.vector, dtype=float).reshape(-1)
        if self.dim <= 0 or len(vec) != self.dim:
            raise ValueError(f"vector length {len(vec)} does not match dim {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("embedding entries must be finite")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @classmethod
    def of(cls, values) -> "Embedding":
        vec = np.asarray(values, dtype=float).reshape(-1)
        return cls(vector=vec, dim=len(vec))


class Captioner(abc.ABC):
    """Produces a textual caption for a frame."""

    backend_id: BackendId

    @abc.abstractmethod
    def caption(self, frame: Frame) -> str: ...


class TextEmbedder(abc.ABC):
    """Embeds text into a fixed-dimensional vector space."""

    backend_id: BackendId

    @abc.abstractmethod
    def embed_text(self, text: str) -> Embedding: ...


class ObjectExtractor(abc.ABC):
    """Extracts the primary object noun phrase from an edit prompt."""

    backend_id: BackendId

    @abc.abstractmethod
    def extract_primary_object(self, edit_prompt: str) -> str: ...


class Detector(abc.ABC):
    """Text-conditioned object detection; empty result means object absent."""

    backend_id: BackendId

    @abc.abstractmethod
    def detect(self, frame: Frame, query: str) -> list[Detection]: ...


class FrameEmbedder(abc.ABC):
    """Embeds a frame into a fixed-dimensional vector space."""

    backend_id: BackendId

    @abc.abstractmethod
    def embed_frame(self, frame: Frame) -> Embedding: ...
