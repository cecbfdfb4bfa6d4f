"""Typed failures raised across the pipeline.

Every error carries a stable ``code`` string so callers (and the CLI exit-code
mapping) can branch on failure kind without string-matching messages.
"""

from __future__ import annotations


class EvalError(Exception):
    """Base class for all pipeline failures."""

    code = "EVAL_ERROR"


# --- ingestion ---

class UnreadableVideoError(EvalError):
    """Video path is missing, unreadable, or does not decode."""

    code = "UNREADABLE_VIDEO"


class EmptyVideoError(EvalError):
    """Decoder opened the file but produced zero frames."""

    code = "EMPTY_VIDEO"


class IdMismatchError(EvalError):
    """Frame sequence and video entry refer to different videos."""

    code = "ID_MISMATCH"


class CacheIOError(EvalError):
    """Cache storage failed at the filesystem level."""

    code = "CACHE_IO"


# --- backends ---

class BackendUnavailableError(EvalError):
    """Backend cannot be reached at all (e.g. connection refused)."""

    code = "BACKEND_UNAVAILABLE"


class InferenceFailedError(EvalError):
    """Backend was reachable but the call failed after retries."""

    code = "INFERENCE_FAILED"


class ExtractionEmptyError(EvalError):
    """Primary-object extraction returned nothing usable."""

    code = "EXTRACTION_EMPTY"


# --- stages ---

class ObjectQueryFailedError(EvalError):
    """Neither the extractor nor the heuristic produced an object query."""

    code = "OBJECT_QUERY_FAILED"


class TooFewFramesError(EvalError):
    """Temporal scoring needs at least two frames."""

    code = "TOO_FEW_FRAMES"


# --- aggregation ---

class RankDeficientError(EvalError):
    """Design matrix rank is below the number of unknowns."""

    code = "RANK_DEFICIENT"


class TooFewSamplesError(EvalError):
    """Not enough fitting rows for the requested method."""

    code = "TOO_FEW_SAMPLES"


class UnsplitVideoError(EvalError):
    """A scored video is missing from the manifest's split map."""

    code = "UNSPLIT_VIDEO"


# --- stats ---

class DegenerateSeriesError(EvalError):
    """A correlation input is constant (zero variance)."""

    code = "DEGENERATE_SERIES"


class AlignmentError(EvalError):
    """Paired series do not share the same labels."""

    code = "ALIGNMENT_ERROR"


# --- reporting ---

class UnknownFormatError(EvalError):
    """Requested render format is not supported."""

    code = "UNKNOWN_FORMAT"


# --- rating service ---

class OutOfRangeError(EvalError):
    """Axis score outside the 1-10 rating scale."""

    code = "OUT_OF_RANGE"


class UnknownVideoError(EvalError):
    """Rated video_id is not part of the dataset."""

    code = "UNKNOWN_VIDEO"


class UnknownDatasetError(EvalError):
    """Requested dataset is not the one this service hosts."""

    code = "UNKNOWN_DATASET"
