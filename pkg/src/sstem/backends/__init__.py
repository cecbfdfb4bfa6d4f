"""Pluggable model backends: contracts, deterministic mocks, and an HTTP
endpoint client, plus the config-file factory used by the CLI.

A backends config file is a JSON object with one section per capability and
an optional top-level "seed" applied to mocks:

    {
      "seed": 7,
      "captioner": {"type": "mock"},
      "text_embedder": {"type": "mock", "dim": 4096},
      "object_extractor": {"type": "mock"},
      "detector": {"type": "mock", "fixtures": {"<content_hash>": 0.72}},
      "frame_embedder": {"type": "endpoint", "base_url": "http://host:8000"}
    }

Missing sections default to plain mocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .base import (
    BACKEND_KINDS,
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
from .endpoint import (
    OBJECT_EXTRACTION_TEMPLATE,
    EndpointCaptioner,
    EndpointConfig,
    EndpointDetector,
    EndpointFrameEmbedder,
    EndpointObjectExtractor,
    EndpointTextEmbedder,
)
from .mock import (
    MockCaptioner,
    MockDetector,
    MockFrameEmbedder,
    MockObjectExtractor,
    MockTextEmbedder,
    heuristic_primary_object,
    tokenize,
)

__all__ = [
    "BACKEND_KINDS",
    "BackendId",
    "BackendSuite",
    "Captioner",
    "Detection",
    "Detector",
    "Embedding",
    "EndpointCaptioner",
    "EndpointConfig",
    "EndpointDetector",
    "EndpointFrameEmbedder",
    "EndpointObjectExtractor",
    "EndpointTextEmbedder",
    "FrameEmbedder",
    "MockCaptioner",
    "MockDetector",
    "MockFrameEmbedder",
    "MockObjectExtractor",
    "MockTextEmbedder",
    "OBJECT_EXTRACTION_TEMPLATE",
    "ObjectExtractor",
    "TextEmbedder",
    "build_suite",
    "heuristic_primary_object",
    "load_backend_config",
    "tokenize",
]


@dataclass(frozen=True)
class BackendSuite:
    """One backend instance per capability; built per worker."""

    captioner: Captioner
    text_embedder: TextEmbedder
    object_extractor: ObjectExtractor
    detector: Detector
    frame_embedder: FrameEmbedder

    def describe(self) -> dict[str, str]:
        """Stable map of capability -> backend slug, used in config echoes."""
        return {
            KIND_CAPTIONER: self.captioner.backend_id.slug(),
            KIND_TEXT_EMBEDDER: self.text_embedder.backend_id.slug(),
            KIND_OBJECT_EXTRACTOR: self.object_extractor.backend_id.slug(),
            KIND_DETECTOR: self.detector.backend_id.slug(),
            KIND_FRAME_EMBEDDER: self.frame_embedder.backend_id.slug(),
        }


def load_backend_config(path: str | Path) -> dict:
    config = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(config, dict):
        raise ValueError("backends config must be a JSON object")
    for key in config:
        if key != "seed" and key not in BACKEND_KINDS:
            raise ValueError(f"unknown backends config section '{key}'")
    return config


def _endpoint_config(section: dict) -> EndpointConfig:
    return EndpointConfig(
        base_url=str(section["base_url"]),
        timeout=float(section.get("timeout", 30.0)),
        retries=int(section.get("retries", 2)),
        backoff=float(section.get("backoff", 0.5)),
    )


def build_suite(config: dict | None = None, seed: int | None = None) -> BackendSuite:
    """Instantiate the five backends from a config mapping.

    ``seed`` overrides the config's top-level seed for mock backends. Call
    once per worker: endpoint clients hold sessions and mocks are cheap.
    """
    config = dict(config or {})
    effective_seed = seed if seed is not None else int(config.get("seed", 0))

    def section(kind: str) -> dict:
        raw = config.get(kind, {"type": "mock"})
        if not isinstance(raw, dict) or raw.get("type", "mock") not in ("mock", "endpoint"):
            raise ValueError(f"backends config section '{kind}' must declare type mock|endpoint")
        return raw

    def is_endpoint(sec: dict) -> bool:
        return sec.get("type", "mock") == "endpoint"

    cap = section(KIND_CAPTIONER)
    captioner = (
        EndpointCaptioner(_endpoint_config(cap))
        if is_endpoint(cap)
        else MockCaptioner(fixtures=cap.get("fixtures"))
    )

    txt = section(KIND_TEXT_EMBEDDER)
    text_embedder = (
        EndpointTextEmbedder(_endpoint_config(txt))
        if is_endpoint(txt)
        else MockTextEmbedder(dim=int(txt.get("dim", 4096)), seed=effective_seed)
    )

    ext = section(KIND_OBJECT_EXTRACTOR)
    object_extractor = (
        EndpointObjectExtractor(_endpoint_config(ext)) if is_endpoint(ext) else MockObjectExtractor()
    )

    det = section(KIND_DETECTOR)
    detector = (
        EndpointDetector(_endpoint_config(det))
        if is_endpoint(det)
        else MockDetector(fixtures=det.get("fixtures"))
    )

    emb = section(KIND_FRAME_EMBEDDER)
    frame_embedder = (
        EndpointFrameEmbedder(_endpoint_config(emb))
        if is_endpoint(emb)
        else MockFrameEmbedder(
            dim=int(emb.get("dim", 64)),
            seed=effective_seed,
            fixtures=emb.get("fixtures"),
        )
    )

    return BackendSuite(
        captioner=captioner,
        text_embedder=text_embedder,
        object_extractor=object_extractor,
        detector=detector,
        frame_embedder=frame_embedder,
    )
