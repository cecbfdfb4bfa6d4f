"""CLI behaviour: exit codes, file outputs, determinism, serving."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from conftest import synthetic_frames, write_video
from reference_fixtures import STAGE_SCORE_ROWS
from sstem.cli import main
from sstem.ingestion import extract_frames
from sstem.model import DatasetManifest, VideoEntry
from sstem.reporting import read_scores_csv


def make_dataset(tmp_path: Path, n_videos: int = 2, frames_per_video: int = 4) -> DatasetManifest:
    tmp_path.mkdir(parents=True, exist_ok=True)
    videos = []
    split = {}
    for i in range(n_videos):
        vid = f"v{i}"
        path = tmp_path / f"{vid}.avi"
        write_video(path, synthetic_frames(frames_per_video, seed=100 + i))
        videos.append(
            VideoEntry(
                video_id=vid,
                original_path=str(path),
                edited_path=str(path),
                edit_prompt=f"turn the scene into a red car {i}",
                model_name="editor-a" if i % 2 == 0 else "editor-b",
            )
        )
        split[vid] = "optimization" if i < max(1, n_videos - 1) else "validation"
    manifest = DatasetManifest(dataset_id="cli-ds", videos=tuple(videos), split=split)
    manifest_path = tmp_path / "manifest.json"
    manifest.save(manifest_path)
    return manifest


# caption pool with varying token overlap against the "... red car i" prompts
CAPTION_POOL = ("a red car", "a red box", "a blue car", "the scene again", "red car turn", "a dog")


def mock_fixtures_for(manifest: DatasetManifest) -> tuple[dict[str, float], dict[str, str]]:
    detector: dict[str, float] = {}
    captioner: dict[str, str] = {}
    value = 0.35
    counter = 0
    for entry in manifest.videos:
        for frame in extract_frames(entry).frames:
            detector[frame.content_hash] = round(value % 0.9 + 0.05, 3)
            captioner[frame.content_hash] = CAPTION_POOL[counter % len(CAPTION_POOL)]
            value += 0.17
            counter += 1
    return detector, captioner


def write_backends_config(tmp_path: Path, manifest: DatasetManifest, seed: int = 7) -> Path:
    detector, captioner = mock_fixtures_for(manifest)
    config = {
        "seed": seed,
        "detector": {"type": "mock", "fixtures": detector},
        "captioner": {"type": "mock", "fixtures": captioner},
    }
    path = tmp_path / "backends.json"
    path.write_text(json.dumps(config))
    return path


class TestScoreCommand:
    def test_two_video_manifest_two_rows_deterministic(self, tmp_path):
        manifest = make_dataset(tmp_path)
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        args = ["score", "--manifest", str(tmp_path / "manifest.json"), "--seed", "3", "--no-cache"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        rows = read_scores_csv(out_a)
        assert [r.video_id for r in rows] == ["v0", "v1"]
        assert all(0.0 <= r.s_similarity <= 1.0 for r in rows)

    def test_missing_manifest_exit_2(self, tmp_path):
        code = main(
            ["score", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.csv")]
        )
        assert code == 2

    def test_invalid_manifest_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dataset_id": "x", "videos": [], "split": {}}))
        assert main(["score", "--manifest", str(bad), "--out", str(tmp_path / "o.csv")]) == 2

    def test_unreachable_endpoint_exit_3(self, tmp_path):
        manifest = make_dataset(tmp_path)
        config = tmp_path / "backends.json"
        config.write_text(
            json.dumps(
                {
                    "captioner": {
                        "type": "endpoint",
                        "base_url": "http://127.0.0.1:9",
                        "timeout": 0.3,
                        "retries": 0,
                        "backoff": 0.0,
                    }
                }
            )
        )
        code = main(
            [
                "score",
                "--manifest",
                str(tmp_path / "manifest.json"),
                "--backends",
                str(config),
                "--no-cache",
                "--out",
                str(tmp_path / "o.csv"),
            ]
        )
        assert code == 3

    def test_partial_failure_exit_1(self, tmp_path):
        manifest = make_dataset(tmp_path, n_videos=2)
        # break one video file after manifest creation
        (tmp_path / "v1.avi").unlink()
        code = main(
            [
                "score",
                "--manifest",
                str(tmp_path / "manifest.json"),
                "--no-cache",
                "--out",
                str(tmp_path / "o.csv"),
            ]
        )
        assert code == 1
        rows = read_scores_csv(tmp_path / "o.csv")
        assert [r.video_id for r in rows] == ["v0"]

    def test_workers_parallel_equals_serial(self, tmp_path):
        manifest = make_dataset(tmp_path, n_videos=4)
        base = ["score", "--manifest", str(tmp_path / "manifest.json"), "--seed", "5", "--no-cache"]
        assert main(base + ["--workers", "1", "--out", str(tmp_path / "serial.csv")]) == 0
        assert main(base + ["--workers", "4", "--out", str(tmp_path / "parallel.csv")]) == 0
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()

    def test_cache_reuse_is_transparent(self, tmp_path):
        manifest = make_dataset(tmp_path)
        cache_dir = tmp_path / "cache"
        base = [
            "score",
            "--manifest",
            str(tmp_path / "manifest.json"),
            "--seed",
            "2",
            "--cache-dir",
            str(cache_dir),
        ]
        assert main(base + ["--out", str(tmp_path / "cold.csv")]) == 0
        assert main(base + ["--out", str(tmp_path / "warm.csv")]) == 0
        assert (tmp_path / "cold.csv").read_bytes() == (tmp_path / "warm.csv").read_bytes()
        assert any(cache_dir.iterdir())


def write_reference_fit_inputs(tmp_path: Path) -> tuple[Path, Path, Path]:
    """Scores/human/manifest files built from the shipped six-model fixture."""
    videos = []
    split = {}
    scores_lines = ["video_id,model_name,s_similarity,s_object,s_temporal,n_frames,stride"]
    human_lines = ["video_id,mean_normalized,n_raters"]
    for model, (s, o, t, final) in STAGE_SCORE_ROWS.items():
        vid = model.lower()
        videos.append(VideoEntry(vid, f"/o/{vid}.mp4", f"/e/{vid}.mp4", "a cat", model))
        split[vid] = "optimization"
        scores_lines.append(f"{vid},{model},{s!r},{o!r},{t!r},8,1")
        human_lines.append(f"{vid},{final!r},1")
    manifest = DatasetManifest(dataset_id="fit-ds", videos=tuple(videos), split=split)
    manifest_path = tmp_path / "manifest.json"
    manifest.save(manifest_path)
    scores_path = tmp_path / "scores.csv"
    scores_path.write_text("\n".join(scores_lines) + "\n")
    human_path = tmp_path / "human.csv"
    human_path.write_text("\n".join(human_lines) + "\n")
    return manifest_path, scores_path, human_path


class TestFitCommand:
    def test_reference_rows_recover_reconstructed_weights(self, tmp_path, capsys):
        manifest_path, scores_path, human_path = write_reference_fit_inputs(tmp_path)
        out = tmp_path / "weights.json"
        code = main(
            [
                "fit",
                "--manifest",
                str(manifest_path),
                "--scores",
                str(scores_path),
                "--human",
                str(human_path),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        weights = json.loads(out.read_text())
        assert weights["w1"] == pytest.approx(0.361, abs=2e-3)
        assert weights["w2"] == pytest.approx(0.138, abs=2e-3)
        assert weights["w3"] == pytest.approx(0.501, abs=2e-3)

    def test_exact_linear_data_near_zero_loss(self, tmp_path):
        videos = []
        split = {}
        scores_lines = ["video_id,model_name,s_similarity,s_object,s_temporal,n_frames,stride"]
        human_lines = ["video_id,mean_normalized,n_raters"]
        import numpy as np

        rng = np.random.default_rng(9)
        for i in range(8):
            vid = f"v{i}"
            s, o, t = (float(v) for v in rng.uniform(0.1, 0.9, size=3))
            videos.append(VideoEntry(vid, "/o.mp4", "/e.mp4", "a cat", "m"))
            split[vid] = "optimization" if i < 6 else "validation"
            scores_lines.append(f"{vid},m,{s!r},{o!r},{t!r},8,1")
            human_lines.append(f"{vid},{0.2 * s + 0.3 * o + 0.5 * t!r},1")
        DatasetManifest("lin-ds", tuple(videos), split).save(tmp_path / "manifest.json")
        (tmp_path / "scores.csv").write_text("\n".join(scores_lines) + "\n")
        (tmp_path / "human.csv").write_text("\n".join(human_lines) + "\n")
        out = tmp_path / "weights.json"
        code = main(
            [
                "fit",
                "--manifest",
                str(tmp_path / "manifest.json"),
                "--scores",
                str(tmp_path / "scores.csv"),
                "--human",
                str(tmp_path / "human.csv"),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert json.loads(out.read_text())["loss"] <= 1e-18

    def test_two_rows_exit_4(self, tmp_path):
        manifest_path, scores_path, human_path = write_reference_fit_inputs(tmp_path)
        # keep only two score rows
        lines = scores_path.read_text().splitlines()
        scores_path.write_text("\n".join(lines[:3]) + "\n")
        code = main(
            [
                "fit",
                "--manifest",
                str(manifest_path),
                "--scores",
                str(scores_path),
                "--human",
                str(human_path),
                "--out",
                str(tmp_path / "w.json"),
            ]
        )
        assert code == 4


class TestCorrelateCommand:
    def write_metrics(self, tmp_path: Path) -> tuple[Path, Path]:
        from reference_fixtures import HUMAN_COLUMN, RATED_MODELS, metric_column

        metrics_path = tmp_path / "metrics.csv"
        lines = ["label,Imaging Quality,SST-EM"]
        imaging = metric_column("Imaging Quality")
        final = metric_column("SST-EM")
        for i, model in enumerate(RATED_MODELS):
            lines.append(f"{model},{imaging[i]!r},{final[i]!r}")
        metrics_path.write_text("\n".join(lines) + "\n")

        human_path = tmp_path / "human.csv"
        human_lines = ["video_id,mean_normalized,n_raters"]
        for model, value in zip(RATED_MODELS, HUMAN_COLUMN):
            human_lines.append(f"{model},{value!r},1")
        human_path.write_text("\n".join(human_lines) + "\n")
        return metrics_path, human_path

    def test_reference_table(self, tmp_path):
        metrics_path, human_path = self.write_metrics(tmp_path)
        out = tmp_path / "table.csv"
        code = main(
            ["correlate", "--metrics", str(metrics_path), "--human", str(human_path), "--out", str(out)]
        )
        assert code == 0
        text = out.read_text().splitlines()
        assert text[0] == "metric,pearson,spearman,kendall"
        table = json.loads((tmp_path / "table.json").read_text())
        assert table["SST-EM"]["spearman"] == pytest.approx(1.0, abs=1e-9)
        assert table["Imaging Quality"]["spearman"] == pytest.approx(0.8, abs=1e-9)

    def test_perfect_agreement_synthetic(self, tmp_path):
        (tmp_path / "metrics.csv").write_text("label,m\na,0.1\nb,0.2\nc,0.3\n")
        (tmp_path / "human.csv").write_text("video_id,mean_normalized,n_raters\na,0.4\nb,0.5\nc,0.6\n")
        out = tmp_path / "t.csv"
        code = main(
            [
                "correlate",
                "--metrics",
                str(tmp_path / "metrics.csv"),
                "--human",
                str(tmp_path / "human.csv"),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        table = json.loads((tmp_path / "t.json").read_text())
        assert table["m"]["pearson"] == pytest.approx(1.0, abs=1e-12)
        assert table["m"]["spearman"] == 1.0
        assert table["m"]["kendall"] == 1.0

    def test_misaligned_ids_exit_5(self, tmp_path):
        (tmp_path / "metrics.csv").write_text("label,m\na,0.1\nb,0.2\n")
        (tmp_path / "human.csv").write_text("video_id,mean_normalized,n_raters\na,0.4\nzz,0.5\n")
        code = main(
            [
                "correlate",
                "--metrics",
                str(tmp_path / "metrics.csv"),
                "--human",
                str(tmp_path / "human.csv"),
                "--out",
                str(tmp_path / "t.csv"),
            ]
        )
        assert code == 5


class TestReportCommand:
    def run_pipeline(self, tmp_path: Path, run_dir: str) -> Path:
        manifest = make_dataset(tmp_path, n_videos=4)
        backends = write_backends_config(tmp_path, manifest)
        out_dir = tmp_path / run_dir
        out_dir.mkdir()
        scores = out_dir / "scores.csv"
        assert (
            main(
                [
                    "score",
                    "--manifest",
                    str(tmp_path / "manifest.json"),
                    "--backends",
                    str(backends),
                    "--seed",
                    "11",
                    "--no-cache",
                    "--out",
                    str(scores),
                ]
            )
            == 0
        )
        # synthesize human scores from a fixed weighted sum of the stage scores
        rows = read_scores_csv(scores)
        human = out_dir / "human.csv"
        human_lines = ["video_id,mean_normalized,n_raters"]
        for r in rows:
            value = 0.2 * r.s_similarity + 0.3 * r.s_object + 0.5 * r.s_temporal
            human_lines.append(f"{r.video_id},{value!r},2")
        human.write_text("\n".join(human_lines) + "\n")
        weights = out_dir / "weights.json"
        assert (
            main(
                [
                    "fit",
                    "--manifest",
                    str(tmp_path / "manifest.json"),
                    "--scores",
                    str(scores),
                    "--human",
                    str(human),
                    "--out",
                    str(weights),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "report",
                    "--manifest",
                    str(tmp_path / "manifest.json"),
                    "--scores",
                    str(scores),
                    "--weights",
                    str(weights),
                    "--human",
                    str(human),
                    "--generated-at",
                    "2026-08-08T00:00:00+00:00",
                    "--out-dir",
                    str(out_dir),
                ]
            )
            == 0
        )
        return out_dir

    def test_full_mock_pipeline_byte_stable_report(self, tmp_path):
        first = self.run_pipeline(tmp_path / "one", "run")
        second = self.run_pipeline(tmp_path / "two", "run")
        assert (first / "report.md").read_bytes() == (second / "report.md").read_bytes()
        assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
        assert (first / "report.csv").read_bytes() == (second / "report.csv").read_bytes()
        report = json.loads((first / "report.json").read_text())
        assert report["correlations"] is not None

    def test_report_without_human_scores_flags_section(self, tmp_path, capsys):
        out_dir = self.run_pipeline(tmp_path, "run")
        code = main(
            [
                "report",
                "--manifest",
                str(tmp_path / "manifest.json"),
                "--scores",
                str(out_dir / "scores.csv"),
                "--weights",
                str(out_dir / "weights.json"),
                "--generated-at",
                "2026-08-08T00:00:00+00:00",
                "--out-dir",
                str(out_dir / "nohuman"),
            ]
        )
        assert code == 0
        report = json.loads((out_dir / "nohuman" / "report.json").read_text())
        assert report["correlations"] is None
        assert "no human scores" in report["correlation_note"]


class TestServeCommand:
    def test_occupied_port_exit_6(self, tmp_path):
        make_dataset(tmp_path)
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            code = main(
                [
                    "serve",
                    "--manifest",
                    str(tmp_path / "manifest.json"),
                    "--port",
                    str(port),
                    "--store-dir",
                    str(tmp_path / "store"),
                ]
            )
        finally:
            blocker.close()
        assert code == 6

    def test_serve_subprocess_answers_health(self, tmp_path):
        make_dataset(tmp_path)
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        process = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "sstem.cli",
                "serve",
                "--manifest",
                str(tmp_path / "manifest.json"),
                "--port",
                str(port),
                "--store-dir",
                str(tmp_path / "store"),
            ],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            deadline = time.monotonic() + 15
            body = None
            while time.monotonic() < deadline:
                try:
                    with urllib.request.urlopen(f"http://127.0.0.1:{port}/api/health", timeout=1) as resp:
                        body = json.loads(resp.read())
                    break
                except OSError:
                    if process.poll() is not None:
                        raise AssertionError(
                            f"server exited early: {process.stderr.read().decode()}"
                        )
                    time.sleep(0.1)
            assert body == {"status": "ok", "dataset_id": "cli-ds"}
        finally:
            process.terminate()
            process.wait(timeout=10)
