"""Human-rating collection: durable store, task assignment, aggregates, and
the HTTP service the annotation UI talks to."""

from .http import create_app
from .service import RUBRIC_AXES, AggregateScore, RatingService, RatingTask
from .store import RatingRecord, RatingStore, overall_raw_score

__all__ = [
    "AggregateScore",
    "RUBRIC_AXES",
    "RatingRecord",
    "RatingService",
    "RatingStore",
    "RatingTask",
    "create_app",
    "overall_raw_score",
]
