"""SST-EM: semantic, spatial, and temporal evaluation of video edits.

The pipeline scores each edited video on three axes (caption-prompt
similarity, primary-object detection confidence, consecutive-frame embedding
cosine), combines them with weights fit by least squares against human
ratings, and validates the combination with rank-correlation statistics.
"""

from .aggregation import (
    FitResult,
    aggregate,
    aggregate_components,
    evaluate_loss,
    fit_weights,
    split_rows,
)
from .model import (
    CorrelationRow,
    CorrelationTable,
    DatasetManifest,
    Frame,
    FrameSequence,
    HumanScoreRecord,
    StageScores,
    VideoEntry,
    WeightVector,
    validate_manifest,
)
from .stages import object_score, score_sequence, score_video, semantic_score, temporal_score
from .stats import PairedSeries, correlation_table, kendall_tau_b, pearson, r_squared, spearman

__version__ = "0.1.0"

__all__ = [
    "CorrelationRow",
    "CorrelationTable",
    "DatasetManifest",
    "FitResult",
    "Frame",
    "FrameSequence",
    "HumanScoreRecord",
    "PairedSeries",
    "StageScores",
    "VideoEntry",
    "WeightVector",
    "aggregate",
    "aggregate_components",
    "correlation_table",
    "evaluate_loss",
    "fit_weights",
    "kendall_tau_b",
    "object_score",
    "pearson",
    "r_squared",
    "score_sequence",
    "score_video",
    "semantic_score",
    "spearman",
    "split_rows",
    "temporal_score",
    "validate_manifest",
]
