"""Report assembly, rendering determinism, and file round-trips."""

from __future__ import annotations

import json

import pytest

from sstem.aggregation import aggregate_components
from sstem.errors import UnknownFormatError
from sstem.model import WeightVector, mean_exact
from sstem.reporting import (
    FORMAT_MARKDOWN,
    FORMAT_STRUCTURED,
    FORMAT_TABULAR,
    ScoreRow,
    build_report,
    correlation_csv_bytes,
    human_csv_bytes,
    read_human_csv,
    read_scores_csv,
    render,
    report_from_json,
    write_atomic,
    write_scores_csv,
)

WEIGHTS = WeightVector(0.361, 0.138, 0.501)


def row(video_id: str, model: str, s: float, o: float, t: float) -> ScoreRow:
    return ScoreRow(
        video_id=video_id,
        model_name=model,
        s_similarity=s,
        s_object=o,
        s_temporal=t,
        n_frames=8,
        stride=1,
    )


def sample_rows() -> list[ScoreRow]:
    return [
        row("v1", "editor-b", 0.7, 0.6, 0.9),
        row("v2", "editor-a", 0.8, 0.5, 0.95),
        row("v3", "editor-a", 0.6, 0.7, 0.85),
        row("v4", "editor-b", 0.75, 0.55, 0.92),
    ]


def sample_human() -> dict[str, float]:
    return {"v1": 0.7, "v2": 0.8, "v3": 0.6, "v4": 0.75}


def make_report(human=None):
    return build_report(
        dataset_id="ds",
        rows=sample_rows(),
        weights=WEIGHTS,
        human_aggregates=sample_human() if human is None else human,
        config={"stride": 1, "temporal_form": "direct"},
        generated_at="2026-08-08T00:00:00+00:00",
    )


class TestBuildReport:
    def test_models_sorted_by_name(self):
        report = make_report()
        assert [s.model_name for s in report.per_model] == ["editor-a", "editor-b"]

    def test_per_model_means_match_exact_means(self):
        report = make_report()
        editor_a = [r for r in sample_rows() if r.model_name == "editor-a"]
        summary = report.per_model[0]
        assert summary.mean_similarity == pytest.approx(
            mean_exact([r.s_similarity for r in editor_a]), abs=1e-12
        )
        finals = [
            aggregate_components(r.s_similarity, r.s_object, r.s_temporal, WEIGHTS)
            for r in editor_a
        ]
        assert summary.mean_final == pytest.approx(mean_exact(finals), abs=1e-12)
        assert summary.n_videos == 2

    def test_single_video_model_means_equal_that_video(self):
        rows = [row("v1", "only", 0.61, 0.42, 0.93)]
        report = build_report("ds", rows, WEIGHTS, {}, {}, generated_at="t")
        summary = report.per_model[0]
        assert summary.mean_similarity == 0.61
        assert summary.mean_object == 0.42
        assert summary.mean_temporal == 0.93

    def test_empty_human_scores_flags_missing_correlations(self):
        report = make_report(human={})
        assert report.correlations is None
        assert "no human scores" in report.correlation_note

    def test_correlation_rows_present_with_human_scores(self):
        report = make_report()
        assert report.correlations is not None
        assert set(report.correlations.rows) == {
            "Semantic Similarity",
            "Object Detection",
            "Temporal Consistency",
            "SST-EM",
        }

    def test_deterministic_for_identical_inputs(self):
        assert make_report() == make_report()


class TestRender:
    def test_render_twice_identical_bytes(self):
        report = make_report()
        for fmt in (FORMAT_MARKDOWN, FORMAT_STRUCTURED, FORMAT_TABULAR):
            assert render(report, fmt) == render(report, fmt)

    def test_markdown_has_one_row_per_model(self):
        text = render(make_report(), FORMAT_MARKDOWN).decode()
        assert "| editor-a |" in text
        assert "| editor-b |" in text
        # stage means rendered at 6 decimals
        assert "0.700000" in text

    def test_structured_round_trips(self):
        report = make_report()
        parsed = report_from_json(render(report, FORMAT_STRUCTURED))
        assert parsed == report

    def test_unknown_format_rejected(self):
        with pytest.raises(UnknownFormatError):
            render(make_report(), "yaml")

    def test_tabular_six_decimals(self):
        text = render(make_report(), FORMAT_TABULAR).decode()
        lines = text.strip().splitlines()
        assert lines[0].startswith("model_name,")
        assert len(lines) == 3
        assert ",0.700000," in lines[1] or ",0.700000," in lines[2]

    def test_correlation_csv_layout(self):
        report = make_report()
        text = correlation_csv_bytes(report.correlations).decode()
        lines = text.strip().splitlines()
        assert lines[0] == "metric,pearson,spearman,kendall"
        assert len(lines) == 5


class TestScoresCsv:
    def test_round_trip_exact(self, tmp_path):
        rows = sample_rows()
        path = tmp_path / "scores.csv"
        write_scores_csv(rows, path, config_echo={"stride": 1})
        assert read_scores_csv(path) == rows

    def test_comment_line_carries_config(self, tmp_path):
        path = tmp_path / "scores.csv"
        write_scores_csv(sample_rows(), path, config_echo={"seed": 7})
        first = path.read_text().splitlines()[0]
        assert first.startswith("# config:")
        assert json.loads(first.removeprefix("# config:"))["seed"] == 7

    def test_float_precision_survives(self, tmp_path):
        precise = row("v1", "m", 1 / 3, 2 / 7, 0.9999999999999999)
        path = tmp_path / "scores.csv"
        write_scores_csv([precise], path)
        parsed = read_scores_csv(path)[0]
        assert parsed.s_similarity == 1 / 3
        assert parsed.s_object == 2 / 7
        assert parsed.s_temporal == 0.9999999999999999


class TestHumanCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "human.csv"
        write_atomic(path, human_csv_bytes([("v1", 0.45, 2), ("v2", 1 / 3, 3)]))
        parsed = read_human_csv(path)
        assert parsed == {"v1": 0.45, "v2": 1 / 3}

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "human.csv"
        write_atomic(path, human_csv_bytes([]))
        assert read_human_csv(path) == {}


class TestWriteAtomic:
    def test_no_temp_residue(self, tmp_path):
        target = tmp_path / "out" / "file.txt"
        write_atomic(target, b"payload")
        assert target.read_bytes() == b"payload"
        assert [p.name for p in target.parent.iterdir()] == ["file.txt"]

    def test_overwrites_in_place(self, tmp_path):
        target = tmp_path / "file.txt"
        write_atomic(target, b"one")
        write_atomic(target, b"two")
        assert target.read_bytes() == b"two"
