"""Weighted aggregation of stage scores and least-squares weight fitting.

The final score is a weighted sum of the three stage scores; weights are fit
by minimizing the mean squared error against per-video human scores. Three
fitting modes are supported: plain least squares, least squares with an
intercept, and a simplex mode (non-negative weights renormalized to sum 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import RankDeficientError, TooFewSamplesError, UnsplitVideoError
from .model import (
    SPLIT_OPTIMIZATION,
    TEMPORAL_DIRECT,
    TEMPORAL_FORMS,
    DatasetManifest,
    StageScores,
    WeightVector,
)

METHOD_OLS = "ols"
METHOD_OLS_INTERCEPT = "ols_intercept"
METHOD_SIMPLEX = "simplex"
FIT_METHODS = (METHOD_OLS, METHOD_OLS_INTERCEPT, METHOD_SIMPLEX)

FitRow = tuple[StageScores, float]


@dataclass(frozen=True)
class FitResult:
    """Fitted weights plus the loss they achieve on the fitting rows."""

    weights: WeightVector
    loss: float
    method: str
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "w1": self.weights.w1,
            "w2": self.weights.w2,
            "w3": self.weights.w3,
            "intercept": self.weights.intercept,
            "temporal_form": self.weights.temporal_form,
            "method": self.method,
            "loss": self.loss,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FitResult":
        return cls(
            weights=WeightVector(
                w1=float(data["w1"]),
                w2=float(data["w2"]),
                w3=float(data["w3"]),
                intercept=float(data.get("intercept", 0.0)),
                temporal_form=str(data.get("temporal_form", TEMPORAL_DIRECT)),
            ),
            loss=float(data["loss"]),
            method=str(data["method"]),
            n_samples=int(data["n_samples"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FitResult":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def aggregate_components(
    s_similarity: float, s_object: float, s_temporal: float, weights: WeightVector
) -> float:
    """Weighted sum of the three stage values under the weight vector's form."""
    third = s_temporal if weights.temporal_form == TEMPORAL_DIRECT else 1.0 - s_temporal
    return (
        weights.w1 * s_similarity
        + weights.w2 * s_object
        + weights.w3 * third
        + weights.intercept
    )


def aggregate(scores: StageScores, weights: WeightVector) -> float:
    """Final score for one video."""
    return aggregate_components(scores.s_similarity, scores.s_object, scores.s_temporal, weights)


def evaluate_loss(rows: Sequence[FitRow], weights: WeightVector) -> float:
    """Mean squared error between aggregated and human scores."""
    if not rows:
        raise ValueError("evaluate_loss needs at least one row")
    squares = [(aggregate(scores, weights) - human) ** 2 for scores, human in rows]
    return math.fsum(squares) / len(squares)


def nnls(design: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Non-negative least squares via the Lawson-Hanson active-set method.

    Returns w >= 0 minimizing ||design @ w - target||. Suitable for the small
    systems fitted here (three unknowns); iteration is capped defensively.
    """
    design = np.asarray(design, dtype=float)
    target = np.asarray(target, dtype=float)
    m, n = design.shape
    w = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    tol = 10 * np.finfo(float).eps * np.linalg.norm(design, 1) * max(m, n)
    max_iter = 30 * n

    gradient = design.T @ (target - design @ w)
    iterations = 0
    while (~passive).any() and np.any(gradient[~passive] > tol):
        candidates = np.where(~passive, gradient, -np.inf)
        passive[int(np.argmax(candidates))] = True
        while True:
            iterations += 1
            if iterations > max_iter:
                return w
            trial = np.zeros(n)
            active_cols = np.where(passive)[0]
            trial[active_cols], *_ = np.linalg.lstsq(design[:, active_cols], target, rcond=None)
            if np.all(trial[active_cols] > tol):
                w = trial
                break
            # Step back towards feasibility and drop the blocking variables.
            blocking = passive & (trial <= tol)
            gaps = w[blocking] - trial[blocking]
            ratios = np.where(gaps > 0, w[blocking] / np.where(gaps > 0, gaps, 1.0), np.inf)
            alpha = float(np.min(ratios)) if np.isfinite(ratios).any() else 0.0
            w = w + alpha * (trial - w)
            passive &= w > tol
            w[~passive] = 0.0
        gradient = design.T @ (target - design @ w)
    return w


def _design_matrix(rows: Sequence[FitRow], temporal_form: str) -> tuple[np.ndarray, np.ndarray]:
    features = []
    targets = []
    for scores, human in rows:
        third = scores.s_temporal if temporal_form == TEMPORAL_DIRECT else 1.0 - scores.s_temporal
        features.append([scores.s_similarity, scores.s_object, third])
        targets.append(human)
    return np.array(features, dtype=float), np.array(targets, dtype=float)


def fit_weights(
    rows: Sequence[FitRow],
    method: str = METHOD_OLS,
    temporal_form: str = TEMPORAL_DIRECT,
) -> FitResult:
    """Fit aggregation weights by least squares against human scores.

    ``ols`` solves the unconstrained three-weight problem, ``ols_intercept``
    adds a constant term, and ``simplex`` runs non-negative least squares and
    renormalizes the result onto the probability simplex.
    """
    if method not in FIT_METHODS:
        raise ValueError(f"method must be one of {FIT_METHODS}")
    if temporal_form not in TEMPORAL_FORMS:
        raise ValueError(f"temporal_form must be one of {TEMPORAL_FORMS}")
    minimum = 4 if method == METHOD_OLS_INTERCEPT else 3
    if len(rows) < minimum:
        raise TooFewSamplesError(
            f"{method} needs at least {minimum} rows, got {len(rows)}"
        )

    design, target = _design_matrix(rows, temporal_form)
    intercept = 0.0

    if method == METHOD_SIMPLEX:
        raw = nnls(design, target)
        total = float(raw.sum())
        if total <= 0.0:
            raise RankDeficientError("non-negative fit collapsed to the zero vector")
        w1, w2, w3 = (raw / total).tolist()
    else:
        if method == METHOD_OLS_INTERCEPT:
            design = np.column_stack([design, np.ones(len(rows))])
        solution, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
        if rank < design.shape[1]:
            raise RankDeficientError(
                f"design matrix rank {rank} < {design.shape[1]} unknowns"
            )
        if method == METHOD_OLS_INTERCEPT:
            w1, w2, w3, intercept = solution.tolist()
        else:
            w1, w2, w3 = solution.tolist()

    weights = WeightVector(w1=w1, w2=w2, w3=w3, intercept=intercept, temporal_form=temporal_form)
    return FitResult(
        weights=weights,
        loss=evaluate_loss(rows, weights),
        method=method,
        n_samples=len(rows),
    )


def split_rows(
    manifest: DatasetManifest, rows: Sequence[FitRow]
) -> tuple[list[FitRow], list[FitRow]]:
    """Partition fitting rows into (optimization, validation) per the manifest."""
    optimization: list[FitRow] = []
    validation: list[FitRow] = []
    for row in rows:
        scores, _ = row
        label = manifest.split.get(scores.video_id)
        if label is None:
            raise UnsplitVideoError(f"video '{scores.video_id}' has no split assignment")
        if label == SPLIT_OPTIMIZATION:
            optimization.append(row)
        else:
            validation.append(row)
    return optimization, validation
