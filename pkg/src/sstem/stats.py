"""Correlation and goodness-of-fit statistics for validating metric scores
against human ratings.

Tie handling is fixed: Spearman uses fractional (tie-averaged) ranks and
Kendall is the tau-b variant with tie corrections in both series. All
functions are pure and raise ``DegenerateSeriesError`` on constant input
rather than returning NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import AlignmentError, DegenerateSeriesError
from .model import CorrelationRow, CorrelationTable


@dataclass(frozen=True)
class PairedSeries:
    """Two aligned real-valued series, one value pair per label."""

    labels: tuple[str, ...]
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        n = len(self.labels)
        if len(self.x) != n or len(self.y) != n:
            raise ValueError("labels, x and y must have equal lengths")
        if n < 2:
            raise ValueError("paired series needs at least two observations")
        if any(not math.isfinite(v) for v in self.x + self.y):
            raise ValueError("series values must be finite")

    def __len__(self) -> int:
        return len(self.labels)


def align_series(
    x_by_label: Mapping[str, float],
    y_by_label: Mapping[str, float],
) -> PairedSeries:
    """Join two label->value maps into a PairedSeries sorted by label.

    Raises AlignmentError when the label sets differ.
    """
    if set(x_by_label) != set(y_by_label):
        missing = sorted(set(x_by_label) ^ set(y_by_label))
        raise AlignmentError(f"label sets differ; unmatched labels: {missing}")
    labels = tuple(sorted(x_by_label))
    return PairedSeries(
        labels=labels,
        x=tuple(x_by_label[k] for k in labels),
        y=tuple(y_by_label[k] for k in labels),
    )


def _centered(values: Sequence[float]) -> tuple[list[float], float]:
    mean = math.fsum(values) / len(values)
    deviations = [v - mean for v in values]
    return deviations, math.fsum(d * d for d in deviations)


def pearson(series: PairedSeries) -> float:
    """Pearson correlation: mean-centered cross products over the product of
    root sums of squares."""
    dx, sxx = _centered(series.x)
    dy, syy = _centered(series.y)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeriesError("pearson undefined for a constant series")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def fractional_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied observations share the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman(series: PairedSeries) -> float:
    """Spearman rank correlation: Pearson on fractional ranks."""
    ranked = PairedSeries(
        labels=series.labels,
        x=tuple(fractional_ranks(series.x)),
        y=tuple(fractional_ranks(series.y)),
    )
    return pearson(ranked)


def _tie_pair_count(values: Sequence[float]) -> int:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def kendall_tau_b(series: PairedSeries) -> float:
    """Kendall tau-b: (C - D) / sqrt((n0 - t_x)(n0 - t_y)) with tie corrections."""
    x, y = series.x, series.y
    n = len(x)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            sign = (x[i] - x[j]) * (y[i] - y[j])
            if sign > 0:
                concordant += 1
            elif sign < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    tx = _tie_pair_count(x)
    ty = _tie_pair_count(y)
    denom = (n0 - tx) * (n0 - ty)
    if denom <= 0:
        raise DegenerateSeriesError("kendall tau-b undefined for a constant series")
    tau = (concordant - discordant) / math.sqrt(denom)
    return max(-1.0, min(1.0, tau))


def r_squared(series: PairedSeries) -> float:
    """Coefficient of determination of the least-squares line of y on x.

    Computed as 1 - SS_res / SS_tot; for simple regression this equals the
    squared Pearson correlation.
    """
    dx, sxx = _centered(series.x)
    dy, syy = _centered(series.y)
    if sxx == 0.0:
        raise DegenerateSeriesError("regression undefined for constant x")
    if syy == 0.0:
        raise DegenerateSeriesError("r_squared undefined for constant y")
    slope = math.fsum(a * b for a, b in zip(dx, dy)) / sxx
    ss_res = math.fsum((b - slope * a) ** 2 for a, b in zip(dx, dy))
    return 1.0 - ss_res / syy


def correlation_table(metrics: Mapping[str, PairedSeries]) -> CorrelationTable:
    """All three coefficients for each named metric-vs-human series.

    Every series must carry the same labels in the same order; row-level
    failures are re-raised with the metric name attached.
    """
    if not metrics:
        raise ValueError("correlation_table needs at least one metric series")
    reference: tuple[str, ...] | None = None
    rows: dict[str, CorrelationRow] = {}
    for name, series in metrics.items():
        if reference is None:
            reference = series.labels
        elif series.labels != reference:
            raise AlignmentError(
                f"metric '{name}' labels {list(series.labels)} do not match {list(reference)}"
            )
        try:
            rows[name] = CorrelationRow(
                pearson=pearson(series),
                spearman=spearman(series),
                kendall=kendall_tau_b(series),
            )
        except DegenerateSeriesError as exc:
            raise DegenerateSeriesError(f"metric '{name}': {exc}") from exc
    return CorrelationTable(rows=rows)
