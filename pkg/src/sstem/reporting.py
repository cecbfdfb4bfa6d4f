"""Report assembly and file formats.

One report gathers per-model score means, the weights used, and (when human
scores are available) the correlation table. Rendering is deterministic:
given identical inputs the bytes are identical, with the explicit
``generated_at`` field as the only wall-clock dependent content. Score values
render with 6 decimals, correlation coefficients with 3. All file writes are
atomic (temp file + rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from .aggregation import aggregate_components
from .errors import DegenerateSeriesError, UnknownFormatError
from .model import (
    CorrelationTable,
    StageScores,
    VideoEntry,
    WeightVector,
    mean_exact,
)
from .stats import PairedSeries, correlation_table

FORMAT_TABULAR = "tabular"
FORMAT_STRUCTURED = "structured"
FORMAT_MARKDOWN = "markdown"
RENDER_FORMATS = (FORMAT_TABULAR, FORMAT_STRUCTURED, FORMAT_MARKDOWN)

SCORES_HEADER = ("video_id", "model_name", "s_similarity", "s_object", "s_temporal", "n_frames", "stride")
HUMAN_HEADER = ("video_id", "mean_normalized", "n_raters")

METRIC_SEMANTIC = "Semantic Similarity"
METRIC_OBJECT = "Object Detection"
METRIC_TEMPORAL = "Temporal Consistency"
METRIC_FINAL = "SST-EM"


def write_atomic(path: str | Path, data: bytes) -> None:
    """Write bytes via a temp file and rename so readers never see partials."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


@dataclass(frozen=True)
class ScoreRow:
    """One scored video as exported to the scores table."""

    video_id: str
    model_name: str
    s_similarity: float
    s_object: float
    s_temporal: float
    n_frames: int
    stride: int

    @classmethod
    def from_scores(cls, scores: StageScores, entry: VideoEntry, stride: int) -> "ScoreRow":
        return cls(
            video_id=scores.video_id,
            model_name=entry.model_name,
            s_similarity=scores.s_similarity,
            s_object=scores.s_object,
            s_temporal=scores.s_temporal,
            n_frames=scores.n_frames,
            stride=stride,
        )

    def stage_scores(self) -> StageScores:
        return StageScores(
            video_id=self.video_id,
            s_similarity=self.s_similarity,
            s_object=self.s_object,
            s_temporal=self.s_temporal,
            n_frames=self.n_frames,
        )


def scores_csv_bytes(rows: Sequence[ScoreRow], config_echo: Mapping | None = None) -> bytes:
    """Render score rows as CSV; float fields use shortest round-trip repr."""
    out = io.StringIO()
    if config_echo:
        out.write(f"# config: {json.dumps(dict(config_echo), sort_keys=True)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCORES_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.video_id,
                row.model_name,
                repr(row.s_similarity),
                repr(row.s_object),
                repr(row.s_temporal),
                row.n_frames,
                row.stride,
            ]
        )
    return out.getvalue().encode("utf-8")


def write_scores_csv(rows: Sequence[ScoreRow], path: str | Path, config_echo: Mapping | None = None) -> None:
    write_atomic(path, scores_csv_bytes(rows, config_echo))


def read_scores_csv(path: str | Path) -> list[ScoreRow]:
    lines = [
        line for line in Path(path).read_text(encoding="utf-8").splitlines() if not line.startswith("#")
    ]
    reader = csv.DictReader(lines)
    rows = []
    for record in reader:
        rows.append(
            ScoreRow(
                video_id=record["video_id"],
                model_name=record["model_name"],
                s_similarity=float(record["s_similarity"]),
                s_object=float(record["s_object"]),
                s_temporal=float(record["s_temporal"]),
                n_frames=int(record["n_frames"]),
                stride=int(record["stride"]),
            )
        )
    return rows


def human_csv_bytes(aggregates: Sequence[tuple[str, float, int]]) -> bytes:
    """Rows of (video_id, mean_normalized, n_raters)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HUMAN_HEADER)
    for video_id, mean_normalized, n_raters in aggregates:
        writer.writerow([video_id, repr(float(mean_normalized)), n_raters])
    return out.getvalue().encode("utf-8")


def read_human_csv(path: str | Path) -> dict[str, float]:
    """Map of video_id -> mean normalized human score."""
    lines = [
        line for line in Path(path).read_text(encoding="utf-8").splitlines() if not line.startswith("#")
    ]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return {}
    value_field = "mean_normalized" if "mean_normalized" in reader.fieldnames else reader.fieldnames[1]
    key_field = "video_id" if "video_id" in reader.fieldnames else reader.fieldnames[0]
    return {record[key_field]: float(record[value_field]) for record in reader}


@dataclass(frozen=True)
class ModelSummary:
    """Mean stage and final scores over one editing model's videos."""

    model_name: str
    mean_similarity: float
    mean_object: float
    mean_temporal: float
    mean_final: float
    n_videos: int


@dataclass(frozen=True)
class EvaluationReport:
    dataset_id: str
    per_model: tuple[ModelSummary, ...]
    weights: WeightVector
    correlations: CorrelationTable | None
    correlation_note: str
    config: dict
    generated_at: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_model", tuple(self.per_model))
        object.__setattr__(self, "config", dict(self.config))


def build_report(
    dataset_id: str,
    rows: Sequence[ScoreRow],
    weights: WeightVector,
    human_aggregates: Mapping[str, float],
    config: Mapping,
    generated_at: str | None = None,
) -> EvaluationReport:
    """Assemble the evaluation report; deterministic for identical inputs."""
    if not rows:
        raise ValueError("build_report needs at least one score row")

    by_model: dict[str, list[ScoreRow]] = {}
    for row in rows:
        by_model.setdefault(row.model_name, []).append(row)

    summaries = []
    for model_name in sorted(by_model):
        model_rows = by_model[model_name]
        finals = [
            aggregate_components(r.s_similarity, r.s_object, r.s_temporal, weights)
            for r in model_rows
        ]
        summaries.append(
            ModelSummary(
                model_name=model_name,
                mean_similarity=mean_exact([r.s_similarity for r in model_rows]),
                mean_object=mean_exact([r.s_object for r in model_rows]),
                mean_temporal=mean_exact([r.s_temporal for r in model_rows]),
                mean_final=mean_exact(finals),
                n_videos=len(model_rows),
            )
        )

    correlations: CorrelationTable | None = None
    note = ""
    rated = [row for row in rows if row.video_id in human_aggregates]
    if not human_aggregates:
        note = "no human scores supplied; correlation section omitted"
    elif len(rated) < 2:
        note = "fewer than two videos have human scores; correlation section omitted"
    else:
        labels = tuple(sorted(r.video_id for r in rated))
        by_id = {r.video_id: r for r in rated}
        human = tuple(human_aggregates[v] for v in labels)

        def series(values_by_id: Mapping[str, float]) -> PairedSeries:
            return PairedSeries(labels=labels, x=tuple(values_by_id[v] for v in labels), y=human)

        metric_values = {
            METRIC_SEMANTIC: {v: by_id[v].s_similarity for v in labels},
            METRIC_OBJECT: {v: by_id[v].s_object for v in labels},
            METRIC_TEMPORAL: {v: by_id[v].s_temporal for v in labels},
            METRIC_FINAL: {
                v: aggregate_components(
                    by_id[v].s_similarity, by_id[v].s_object, by_id[v].s_temporal, weights
                )
                for v in labels
            },
        }
        try:
            correlations = correlation_table({name: series(vals) for name, vals in metric_values.items()})
        except DegenerateSeriesError as exc:
            note = f"correlations unavailable: {exc}"

    return EvaluationReport(
        dataset_id=dataset_id,
        per_model=tuple(summaries),
        weights=weights,
        correlations=correlations,
        correlation_note=note,
        config=dict(config),
        generated_at=generated_at or datetime.now(timezone.utc).isoformat(),
    )


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "dataset_id": report.dataset_id,
        "per_model": [
            {
                "model_name": s.model_name,
                "mean_similarity": s.mean_similarity,
                "mean_object": s.mean_object,
                "mean_temporal": s.mean_temporal,
                "mean_final": s.mean_final,
                "n_videos": s.n_videos,
            }
            for s in report.per_model
        ],
        "weights": {
            "w1": report.weights.w1,
            "w2": report.weights.w2,
            "w3": report.weights.w3,
            "intercept": report.weights.intercept,
            "temporal_form": report.weights.temporal_form,
        },
        "correlations": report.correlations.to_dict() if report.correlations else None,
        "correlation_note": report.correlation_note,
        "config": report.config,
        "generated_at": report.generated_at,
    }


def report_from_dict(data: Mapping) -> EvaluationReport:
    weights = data["weights"]
    return EvaluationReport(
        dataset_id=str(data["dataset_id"]),
        per_model=tuple(
            ModelSummary(
                model_name=item["model_name"],
                mean_similarity=float(item["mean_similarity"]),
                mean_object=float(item["mean_object"]),
                mean_temporal=float(item["mean_temporal"]),
                mean_final=float(item["mean_final"]),
                n_videos=int(item["n_videos"]),
            )
            for item in data["per_model"]
        ),
        weights=WeightVector(
            w1=float(weights["w1"]),
            w2=float(weights["w2"]),
            w3=float(weights["w3"]),
            intercept=float(weights.get("intercept", 0.0)),
            temporal_form=str(weights.get("temporal_form", "direct")),
        ),
        correlations=CorrelationTable.from_dict(data["correlations"]) if data.get("correlations") else None,
        correlation_note=str(data.get("correlation_note", "")),
        config=dict(data.get("config", {})),
        generated_at=str(data["generated_at"]),
    )


def report_from_json(data: bytes) -> EvaluationReport:
    return report_from_dict(json.loads(data.decode("utf-8")))


def _render_markdown(report: EvaluationReport) -> bytes:
    lines = [
        f"# Evaluation report: {report.dataset_id}",
        "",
        f"Generated at: {report.generated_at}",
        "",
        "## Configuration",
        "",
    ]
    for key in sorted(report.config):
        lines.append(f"- {key}: {report.config[key]}")
    w = report.weights
    lines += [
        "",
        "## Weights",
        "",
        f"- w1 (semantic): {w.w1:.6f}",
        f"- w2 (object): {w.w2:.6f}",
        f"- w3 (temporal): {w.w3:.6f}",
        f"- intercept: {w.intercept:.6f}",
        f"- temporal form: {w.temporal_form}",
        "",
        "## Per-model scores",
        "",
        "| Model | Semantic | Object | Temporal | SST-EM | Videos |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for s in report.per_model:
        lines.append(
            f"| {s.model_name} | {s.mean_similarity:.6f} | {s.mean_object:.6f} "
            f"| {s.mean_temporal:.6f} | {s.mean_final:.6f} | {s.n_videos} |"
        )
    lines += ["", "## Correlations with human scores", ""]
    if report.correlations is None:
        lines.append(f"_{report.correlation_note or 'not computed'}_")
    else:
        lines += [
            "| Metric | Pearson | Spearman | Kendall |",
            "| --- | --- | --- | --- |",
        ]
        for name, row in report.correlations.rows.items():
            lines.append(f"| {name} | {row.pearson:.3f} | {row.spearman:.3f} | {row.kendall:.3f} |")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def _render_tabular(report: EvaluationReport) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model_name", "mean_similarity", "mean_object", "mean_temporal", "mean_final", "n_videos"])
    for s in report.per_model:
        writer.writerow(
            [
                s.model_name,
                f"{s.mean_similarity:.6f}",
                f"{s.mean_object:.6f}",
                f"{s.mean_temporal:.6f}",
                f"{s.mean_final:.6f}",
                s.n_videos,
            ]
        )
    return out.getvalue().encode("utf-8")


def render(report: EvaluationReport, fmt: str) -> bytes:
    """Render a report to bytes in one of the supported formats."""
    if fmt == FORMAT_MARKDOWN:
        return _render_markdown(report)
    if fmt == FORMAT_STRUCTURED:
        return (json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if fmt == FORMAT_TABULAR:
        return _render_tabular(report)
    raise UnknownFormatError(f"unsupported render format '{fmt}'; expected one of {RENDER_FORMATS}")


def correlation_csv_bytes(table: CorrelationTable) -> bytes:
    """Correlation table in (metric, pearson, spearman, kendall) layout."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "pearson", "spearman", "kendall"])
    for name, row in table.rows.items():
        writer.writerow([name, f"{row.pearson:.3f}", f"{row.spearman:.3f}", f"{row.kendall:.3f}"])
    return out.getvalue().encode("utf-8")
