"""The three per-video stage scores.

semantic:  mean over frames of the clamped cosine between the embedded frame
           caption and the embedded edit prompt.
object:    mean over frames of the best matching detection confidence for the
           prompt's primary object (0 when absent in a frame).
temporal:  mean over consecutive frame pairs of the clamped cosine between
           frame embeddings.

Cosines are clamped to [0, 1] before averaging so all stages share a unit
interval; means use exact rational averaging. Backend failures propagate
tagged with the frame index (and, from score_video, the stage name).
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .backends import BackendSuite
from .backends.base import Captioner, Detection, Detector, Embedding, FrameEmbedder, ObjectExtractor, TextEmbedder
from .backends.mock import heuristic_primary_object
from .errors import (
    EvalError,
    ExtractionEmptyError,
    ObjectQueryFailedError,
    TooFewFramesError,
)
from .ingestion import FrameCache, cached_call, extract_frames
from .model import Frame, FrameSequence, StageScores, VideoEntry, mean_exact

ARTIFACT_CAPTION = "caption"
ARTIFACT_DETECTIONS = "detections"
ARTIFACT_FRAME_EMBEDDING = "frameembedding"


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; identical vectors return exactly 1.0 and a zero
    vector on either side yields 0.0."""
    u = np.asarray(u, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if u.shape != v.shape:
        raise ValueError(f"vector dims differ: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    if np.array_equal(u, v):
        return 1.0
    return float(np.dot(u, v)) / (norm_u * norm_v)


def clamp01(value: float) -> float:
    return 0.0 if value < 0.0 else (1.0 if value > 1.0 else value)


def _tag_frame(index: int, exc: EvalError) -> EvalError:
    return type(exc)(f"frame {index}: {exc}")


def _encode_text(caption: str) -> bytes:
    return caption.encode("utf-8")


def _encode_detections(detections: list[Detection]) -> bytes:
    payload = [
        {"label": d.label, "confidence": d.confidence, "box": list(d.box)} for d in detections
    ]
    return json.dumps(payload, sort_keys=True).encode("utf-8")


def _decode_detections(data: bytes) -> list[Detection]:
    return [
        Detection(label=item["label"], confidence=item["confidence"], box=tuple(item["box"]))
        for item in json.loads(data.decode("utf-8"))
    ]


def _encode_embedding(embedding: Embedding) -> bytes:
    return json.dumps([float(x) for x in embedding.vector]).encode("utf-8")


def _decode_embedding(data: bytes) -> Embedding:
    return Embedding.of(json.loads(data.decode("utf-8")))


def _frame_caption(frame: Frame, captioner: Captioner, cache: FrameCache | None) -> str:
    return cached_call(
        cache,
        frame.content_hash,
        ARTIFACT_CAPTION,
        captioner.backend_id,
        lambda: captioner.caption(frame),
        _encode_text,
        lambda data: data.decode("utf-8"),
    )


def _query_kind(query: str) -> str:
    # Detections depend on the query as well as the pixels; fold the query
    # into the artifact kind so different primary objects don't collide.
    digest = hashlib.blake2b(query.encode("utf-8"), digest_size=4).hexdigest()
    return f"{ARTIFACT_DETECTIONS}.{digest}"


def _frame_detections(
    frame: Frame, query: str, detector: Detector, cache: FrameCache | None
) -> list[Detection]:
    return cached_call(
        cache,
        frame.content_hash,
        _query_kind(query),
        detector.backend_id,
        lambda: detector.detect(frame, query),
        _encode_detections,
        _decode_detections,
    )


def _frame_embedding(frame: Frame, embedder: FrameEmbedder, cache: FrameCache | None) -> Embedding:
    return cached_call(
        cache,
        frame.content_hash,
        ARTIFACT_FRAME_EMBEDDING,
        embedder.backend_id,
        lambda: embedder.embed_frame(frame),
        _encode_embedding,
        _decode_embedding,
    )


def semantic_score(
    seq: FrameSequence,
    prompt: str,
    captioner: Captioner,
    text_embedder: TextEmbedder,
    cache: FrameCache | None = None,
) -> float:
    """Caption-to-prompt alignment, averaged over frames."""
    if not prompt or not prompt.strip():
        raise ValueError("prompt must be non-empty")
    prompt_vec = text_embedder.embed_text(prompt).vector
    values = []
    for frame in seq.frames:
        try:
            caption = _frame_caption(frame, captioner, cache)
            caption_vec = text_embedder.embed_text(caption).vector
        except EvalError as exc:
            raise _tag_frame(frame.index, exc) from exc
        values.append(clamp01(cosine(caption_vec, prompt_vec)))
    return mean_exact(values)


def object_score(
    seq: FrameSequence,
    prompt: str,
    object_extractor: ObjectExtractor,
    detector: Detector,
    cache: FrameCache | None = None,
) -> float:
    """Mean per-frame confidence that the prompt's primary object is present.

    The primary object is extracted once per video; per frame the score is the
    maximum confidence among detections whose label matches the query
    (case-insensitive substring in either direction), or 0 when none match.
    """
    if not prompt or not prompt.strip():
        raise ValueError("prompt must be non-empty")
    try:
        query = object_extractor.extract_primary_object(prompt)
    except ExtractionEmptyError:
        try:
            query = heuristic_primary_object(prompt)
        except ExtractionEmptyError as exc:
            raise ObjectQueryFailedError(
                f"no primary object could be derived from prompt: {prompt!r}"
            ) from exc
    values = []
    for frame in seq.frames:
        try:
            detections = _frame_detections(frame, query, detector, cache)
        except EvalError as exc:
            raise _tag_frame(frame.index, exc) from exc
        values.append(max((d.confidence for d in detections if _label_matches(d.label, query)), default=0.0))
    return mean_exact(values)


def _label_matches(label: str, query: str) -> bool:
    a = label.strip().lower()
    b = query.strip().lower()
    return bool(a) and bool(b) and (a in b or b in a)


def temporal_score(
    seq: FrameSequence,
    frame_embedder: FrameEmbedder,
    cache: FrameCache | None = None,
) -> float:
    """Mean clamped cosine between consecutive frame embeddings."""
    if seq.n_frames < 2:
        raise TooFewFramesError(f"temporal score needs >= 2 frames, got {seq.n_frames}")
    embeddings = []
    for frame in seq.frames:
        try:
            embeddings.append(_frame_embedding(frame, frame_embedder, cache).vector)
        except EvalError as exc:
            raise _tag_frame(frame.index, exc) from exc
    values = [
        clamp01(cosine(embeddings[i], embeddings[i + 1])) for i in range(len(embeddings) - 1)
    ]
    return mean_exact(values)


def _tag_stage(stage: str, exc: EvalError) -> EvalError:
    return type(exc)(f"{stage}: {exc}")


def score_video(
    entry: VideoEntry,
    suite: BackendSuite,
    stride: int = 1,
    cache: FrameCache | None = None,
) -> StageScores:
    """Run all three stages on one video entry."""
    try:
        seq = extract_frames(entry, stride=stride)
    except EvalError as exc:
        raise _tag_stage("ingest", exc) from exc
    return score_sequence(seq, entry.edit_prompt, suite, cache=cache)


def score_sequence(
    seq: FrameSequence,
    prompt: str,
    suite: BackendSuite,
    cache: FrameCache | None = None,
) -> StageScores:
    """Score an already-decoded frame sequence."""
    try:
        s_sim = semantic_score(seq, prompt, suite.captioner, suite.text_embedder, cache=cache)
    except EvalError as exc:
        raise _tag_stage("semantic", exc) from exc
    try:
        s_obj = object_score(seq, prompt, suite.object_extractor, suite.detector, cache=cache)
    except EvalError as exc:
        raise _tag_stage("object", exc) from exc
    try:
        s_temp = temporal_score(seq, suite.frame_embedder, cache=cache)
    except EvalError as exc:
        raise _tag_stage("temporal", exc) from exc
    return StageScores(
        video_id=seq.video_id,
        s_similarity=s_sim,
        s_object=s_obj,
        s_temporal=s_temp,
        n_frames=seq.n_frames,
    )
