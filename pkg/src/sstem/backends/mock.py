"""Deterministic mock backends.

Every mock output is a pure function of its input content and the backend's
configuration (seed, dim, fixtures), which makes scores reproducible and lets
tests pin exact expected values. Fixture-bearing mocks fold a digest of their
fixtures into the backend version so differently configured mocks never share
cache entries.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import Mapping, Sequence

import numpy as np

from ..errors import ExtractionEmptyError
from ..model import Frame
from .base import (
    KIND_CAPTIONER,
    KIND_DETECTOR,
    KIND_FRAME_EMBEDDER,
    KIND_OBJECT_EXTRACTOR,
    KIND_TEXT_EMBEDDER,
    BackendId,
    Captioner,
    Detection,
    Detector,
    Embedding,
    FrameEmbedder,
    ObjectExtractor,
    TextEmbedder,
)

EDIT_VERBS = ("turn", "make", "change", "replace", "convert", "transform", "swap")
_ARTICLES = ("a", "an", "the")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _fixture_digest(fixtures) -> str:
    if not fixtures:
        return "plain"
    payload = json.dumps(
        {str(k): v if isinstance(v, (str, int, float)) else str(v) for k, v in dict(fixtures).items()},
        sort_keys=True,
    )
    return hashlib.blake2b(payload.encode("utf-8"), digest_size=4).hexdigest()


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def heuristic_primary_object(edit_prompt: str) -> str:
    """Rule-based primary-object extraction.

    Strips a leading edit-verb construction ("turn/make/... X into Y", or
    "... to Y") and returns the trailing noun phrase with articles removed,
    lowercased. Raises ExtractionEmptyError when nothing usable remains.
    """
    if not edit_prompt or not edit_prompt.strip():
        raise ValueError("edit_prompt must be non-empty")
    tokens = tokenize(edit_prompt)
    if not tokens:
        raise ExtractionEmptyError(f"no usable tokens in prompt: {edit_prompt!r}")

    if tokens[0] in EDIT_VERBS:
        for marker in ("into", "to"):
            if marker in tokens:
                cut = len(tokens) - 1 - tokens[::-1].index(marker)
                tokens = tokens[cut + 1 :]
                break
        else:
            tokens = tokens[1:]
    while tokens and tokens[0] in _ARTICLES:
        tokens = tokens[1:]
    if not tokens:
        raise ExtractionEmptyError(f"prompt reduced to nothing: {edit_prompt!r}")
    return " ".join(tokens)


class MockCaptioner(Captioner):
    """Captions derived from the frame's content hash, or pinned via fixtures."""

    def __init__(self, fixtures: Mapping[str, str] | None = None):
        self.fixtures = dict(fixtures) if fixtures else {}
        self.backend_id = BackendId(KIND_CAPTIONER, "mock", _fixture_digest(self.fixtures))

    def caption(self, frame: Frame) -> str:
        pinned = self.fixtures.get(frame.content_hash)
        if pinned is not None:
            return pinned
        return f"object-{frame.content_hash[:8]}"


class MockTextEmbedder(TextEmbedder):
    """Bag-of-tokens count vector over a hashed vocabulary space.

    Token slots come from a seeded 64-bit blake2 digest modulo ``dim``; with a
    few thousand slots, short disjoint-vocabulary sentences land in disjoint
    slots and their cosine is exactly zero.
    """

    def __init__(self, dim: int = 4096, seed: int = 0):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self.backend_id = BackendId(KIND_TEXT_EMBEDDER, "mock-bag", f"d{dim}-s{seed}")

    def _slot(self, token: str) -> int:
        digest = hashlib.blake2b(f"{self.seed}:{token}".encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def embed_text(self, text: str) -> Embedding:
        if not text or not text.strip():
            raise ValueError("text must be non-empty")
        vec = np.zeros(self.dim)
        for token in tokenize(text):
            vec[self._slot(token)] += 1.0
        return Embedding(vector=vec, dim=self.dim)


class MockObjectExtractor(ObjectExtractor):
    """Applies the rule-based extraction heuristic."""

    def __init__(self):
        self.backend_id = BackendId(KIND_OBJECT_EXTRACTOR, "mock-rule", "1")

    def extract_primary_object(self, edit_prompt: str) -> str:
        return heuristic_primary_object(edit_prompt)


class MockDetector(Detector):
    """Replays detections from a fixture map keyed by frame content hash.

    Fixture values are either a bare confidence (one detection labelled with
    the query) or a sequence of Detections. Unconfigured frames yield no
    detections, i.e. the object is treated as absent.
    """

    DEFAULT_BOX = (0.25, 0.25, 0.75, 0.75)

    def __init__(self, fixtures: Mapping[str, float | Sequence[Detection]] | None = None):
        self.fixtures = dict(fixtures) if fixtures else {}
        self.backend_id = BackendId(KIND_DETECTOR, "mock-fixture", _fixture_digest(self.fixtures))

    def detect(self, frame: Frame, query: str) -> list[Detection]:
        if not query or not query.strip():
            raise ValueError("query must be non-empty")
        configured = self.fixtures.get(frame.content_hash)
        if configured is None:
            return []
        if isinstance(configured, (int, float)):
            return [Detection(label=query, confidence=float(configured), box=self.DEFAULT_BOX)]
        return list(configured)


class MockFrameEmbedder(FrameEmbedder):
    """Unit vectors derived deterministically from frame content hashes.

    Fixture vectors, when provided, are returned exactly as configured.
    """

    def __init__(
        self,
        dim: int = 64,
        seed: int = 0,
        fixtures: Mapping[str, Sequence[float]] | None = None,
    ):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self.fixtures = {k: tuple(float(x) for x in v) for k, v in (fixtures or {}).items()}
        digest = _fixture_digest({k: repr(v) for k, v in self.fixtures.items()})
        self.backend_id = BackendId(KIND_FRAME_EMBEDDER, "mock-hash", f"d{dim}-s{seed}-{digest}")

    def embed_frame(self, frame: Frame) -> Embedding:
        pinned = self.fixtures.get(frame.content_hash)
        if pinned is not None:
            return Embedding.of(pinned)
        material = hashlib.blake2b(
            f"{self.seed}:{frame.content_hash}".encode("utf-8"), digest_size=8
        ).digest()
        rng = np.random.default_rng(int.from_bytes(material, "big"))
        vec = rng.standard_normal(self.dim)
        vec /= np.linalg.norm(vec)
        return Embedding(vector=vec, dim=self.dim)
