"""HTTP client for externally hosted inference endpoints.

Heavyweight model serving stays out of this package; a deployment exposes
one route per capability at POST {base_url}/v1/{kind} with JSON bodies.
Images travel as base64-encoded PNG. The client retries timeouts and 5xx
responses with exponential backoff and never substitutes defaults: every
failure surfaces as a typed error.

Wire formats (request -> response):
    captioner:        {"image_b64", "content_hash"} -> {"caption": str}
    text_embedder:    {"text"}                      -> {"vector": [float]}
    object_extractor: {"prompt"}                    -> {"object": str}
    detector:         {"image_b64", "content_hash", "query"}
                      -> {"detections": [{"label", "confidence", "box": [4]}]}
    frame_embedder:   {"image_b64", "content_hash"} -> {"vector": [float]}
"""

from __future__ import annotations

import base64
import time
from dataclasses import dataclass

import cv2
import numpy as np
import requests

from ..errors import BackendUnavailableError, ExtractionEmptyError, InferenceFailedError
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

# Template sent to the hosted language model for primary-object extraction.
OBJECT_EXTRACTION_TEMPLATE = (
    "Identify the single primary object being edited in this instruction; "
    "answer with a noun phrase only: {prompt}"
)


@dataclass(frozen=True)
class EndpointConfig:
    """Connection settings shared by all endpoint-backed capabilities."""

    base_url: str
    timeout: float = 30.0
    retries: int = 2
    backoff: float = 0.5


def encode_frame(frame: Frame) -> str:
    """Base64 PNG encoding of a frame's RGB pixels."""
    ok, buf = cv2.imencode(".png", cv2.cvtColor(np.asarray(frame.image), cv2.COLOR_RGB2BGR))
    if not ok:
        raise InferenceFailedError("failed to encode frame as PNG")
    return base64.b64encode(buf.tobytes()).decode("ascii")


class _EndpointCall:
    """Shared POST-with-retries plumbing for the five endpoint backends."""

    kind: str

    def __init__(self, config: EndpointConfig, name: str = "endpoint", version: str = "1"):
        self.config = config
        self.backend_id = BackendId(self.kind, name, version)

    def _post(self, payload: dict) -> dict:
        url = f"{self.config.base_url.rstrip('/')}/v1/{self.kind}"
        last_error: str = "no attempt made"
        for attempt in range(self.config.retries + 1):
            if attempt:
                time.sleep(self.config.backoff * (2 ** (attempt - 1)))
            try:
                response = requests.post(url, json=payload, timeout=self.config.timeout)
            except requests.exceptions.ConnectionError as exc:
                raise BackendUnavailableError(f"{self.kind} endpoint unreachable: {url}") from exc
            except requests.exceptions.Timeout:
                last_error = f"timeout after {self.config.timeout}s"
                continue
            if response.status_code >= 500:
                last_error = f"server error {response.status_code}"
                continue
            if response.status_code >= 400:
                raise InferenceFailedError(
                    f"{self.kind} endpoint rejected request: {response.status_code}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise InferenceFailedError(f"{self.kind} endpoint returned malformed JSON") from exc
        raise InferenceFailedError(
            f"{self.kind} endpoint failed after {self.config.retries + 1} attempts: {last_error}"
        )

    def _field(self, body: dict, key: str):
        if key not in body:
            raise InferenceFailedError(f"{self.kind} response missing '{key}' field")
        return body[key]


class EndpointCaptioner(_EndpointCall, Captioner):
    kind = KIND_CAPTIONER

    def caption(self, frame: Frame) -> str:
        body = self._post({"image_b64": encode_frame(frame), "content_hash": frame.content_hash})
        caption = str(self._field(body, "caption"))
        if not caption.strip():
            raise InferenceFailedError("captioner returned an empty caption")
        return caption


class EndpointTextEmbedder(_EndpointCall, TextEmbedder):
    kind = KIND_TEXT_EMBEDDER

    def embed_text(self, text: str) -> Embedding:
        if not text or not text.strip():
            raise ValueError("text must be non-empty")
        body = self._post({"text": text})
        return Embedding.of(self._field(body, "vector"))


class EndpointObjectExtractor(_EndpointCall, ObjectExtractor):
    kind = KIND_OBJECT_EXTRACTOR

    def extract_primary_object(self, edit_prompt: str) -> str:
        if not edit_prompt or not edit_prompt.strip():
            raise ValueError("edit_prompt must be non-empty")
        body = self._post({"prompt": OBJECT_EXTRACTION_TEMPLATE.format(prompt=edit_prompt)})
        phrase = str(self._field(body, "object")).strip().lower()
        if not phrase:
            raise ExtractionEmptyError(f"endpoint extracted nothing from: {edit_prompt!r}")
        return phrase


class EndpointDetector(_EndpointCall, Detector):
    kind = KIND_DETECTOR

    def detect(self, frame: Frame, query: str) -> list[Detection]:
        if not query or not query.strip():
            raise ValueError("query must be non-empty")
        body = self._post(
            {
                "image_b64": encode_frame(frame),
                "content_hash": frame.content_hash,
                "query": query,
            }
        )
        detections = []
        for item in self._field(body, "detections"):
            try:
                detections.append(
                    Detection(
                        label=str(item["label"]),
                        confidence=float(item["confidence"]),
                        box=tuple(float(v) for v in item["box"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InferenceFailedError(f"detector returned malformed detection: {item!r}") from exc
        return detections


class EndpointFrameEmbedder(_EndpointCall, FrameEmbedder):
    kind = KIND_FRAME_EMBEDDER

    def embed_frame(self, frame: Frame) -> Embedding:
        body = self._post({"image_b64": encode_frame(frame), "content_hash": frame.content_hash})
        return Embedding.of(self._field(body, "vector"))
