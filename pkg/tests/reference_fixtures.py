"""Shipped reference benchmark data used as test fixtures.

Six editing models with recorded stage scores and the reference final scores
they aggregate to; for four of those models, a set of published quality
metrics plus the mean human evaluation score. The correlation targets are the
reference coefficients the toolkit is expected to reproduce from this data
(see the stats tests for the one value that is knowably off by rounding).
"""

# model -> (semantic, object, temporal, final)
STAGE_SCORE_ROWS = {
    "AnyV2V": (0.780449, 0.719760, 0.966250, 0.864687),
    "Vid2Me": (0.725520, 0.724870, 0.978866, 0.851886),
    "VideoP2P": (0.749997, 0.701194, 0.932500, 0.834226),
    "TokenFlow": (0.794004, 0.743507, 0.979918, 0.879671),
    "Control-A-Video": (0.732529, 0.738756, 0.958416, 0.846039),
    "FateZero": (0.729603, 0.736148, 0.972566, 0.851731),
}

# Weights reconstructed from the six rows above by least squares (direct form).
RECONSTRUCTED_WEIGHTS = (0.361, 0.138, 0.501)

# The four models that carry human evaluation scores, in fixture order.
RATED_MODELS = ("VideoP2P", "TokenFlow", "Control-A-Video", "FateZero")

HUMAN_SCORES = {
    "VideoP2P": 0.411,
    "TokenFlow": 0.452,
    "Control-A-Video": 0.425,
    "FateZero": 0.433,
}

# Published per-model quality metrics for the four rated models.
QUALITY_METRICS = {
    "Imaging Quality": (0.6665, 0.7408, 0.6973, 0.6907),
    "FF-alpha": (11.8893, 7.2708, 18.0534, 8.0082),
    "FF-beta": (0.2216, 0.1566, 0.2674, 0.1723),
    "Background Consistency": (0.9696, 0.9525, 0.9700, 0.9497),
    "Success Rate": (0.5156, 0.6471, 0.6050, 0.5294),
    "Subject Consistency": (0.9692, 0.9790, 0.9672, 0.9696),
    "Aesthetic Quality": (0.4847, 0.5546, 0.5377, 0.5546),
}


def metric_column(name: str) -> tuple[float, ...]:
    """Metric values across RATED_MODELS, including stage-score columns."""
    if name in QUALITY_METRICS:
        return QUALITY_METRICS[name]
    index = {"Semantic Similarity": 0, "Object Detection": 1, "Temporal Consistency": 2, "SST-EM": 3}[name]
    return tuple(STAGE_SCORE_ROWS[model][index] for model in RATED_MODELS)


HUMAN_COLUMN = tuple(HUMAN_SCORES[m] for m in RATED_MODELS)

# Reference correlation targets for the rated-model data:
# metric -> (spearman, kendall) at 3 decimals.
REFERENCE_RANK_CORRELATIONS = {
    "Imaging Quality": (0.800, 0.666),
    "FF-alpha": (-0.800, -0.666),
    "Success Rate": (0.800, 0.666),
    "Subject Consistency": (0.800, 0.666),
    "Aesthetic Quality": (0.946, 0.912),
    "Temporal Consistency": (1.000, 1.000),
    "Object Detection": (0.800, 0.666),
    "SST-EM": (1.000, 1.000),
}

# metric -> (reference pearson, tolerance)
REFERENCE_PEARSON = {
    "Temporal Consistency": (0.927, 0.015),
    "Object Detection": (0.835, 0.015),
    "Subject Consistency": (0.827, 0.010),
    "Aesthetic Quality": (0.837, 0.010),
    "Imaging Quality": (0.951, 0.010),
}
