"""Command-line entry point.

Subcommands chain the pipeline: score -> fit -> correlate -> report -> serve.
Outputs are written atomically and inputs are never mutated, so every command
is safe to re-run. A fixed --seed makes mock-backend runs bit-reproducible.

Exit codes: 0 success; 1 partial per-video failures; 2 invalid arguments or
unreadable inputs; 3 backend unavailable; 4 fitting failed (rank deficient or
too few samples); 5 label alignment failure; 6 serve port unavailable.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import backends as backend_factory
from .aggregation import (
    FIT_METHODS,
    METHOD_OLS,
    FitResult,
    evaluate_loss,
    fit_weights,
    split_rows,
)
from .errors import (
    AlignmentError,
    BackendUnavailableError,
    EvalError,
    RankDeficientError,
    TooFewSamplesError,
    UnsplitVideoError,
)
from .ingestion import FrameCache
from .model import TEMPORAL_DIRECT, TEMPORAL_FORMS, DatasetManifest, validate_manifest
from .rating import RatingService, RatingStore, create_app
from .reporting import (
    FORMAT_MARKDOWN,
    FORMAT_STRUCTURED,
    FORMAT_TABULAR,
    ScoreRow,
    build_report,
    correlation_csv_bytes,
    read_human_csv,
    read_scores_csv,
    render,
    scores_csv_bytes,
    write_atomic,
)
from .stages import score_video
from .stats import align_series, correlation_table

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_BACKEND = 3
EXIT_FIT = 4
EXIT_ALIGNMENT = 5
EXIT_PORT = 6


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_manifest(path: str) -> DatasetManifest:
    manifest_path = Path(path)
    if not manifest_path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    manifest = DatasetManifest.load(manifest_path)
    violations = validate_manifest(manifest)
    if violations:
        raise ValueError("invalid manifest: " + "; ".join(violations))
    return manifest


def _effective_backend_config(args) -> dict:
    config = backend_factory.load_backend_config(args.backends) if args.backends else {}
    if args.seed is not None:
        config["seed"] = args.seed
    return config


def cmd_score(args) -> int:
    try:
        manifest = _load_manifest(args.manifest)
        config = _effective_backend_config(args)
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    cache = None if args.no_cache else FrameCache(args.cache_dir)
    local = threading.local()

    def suite_for_worker():
        if not hasattr(local, "suite"):
            local.suite = backend_factory.build_suite(config, seed=args.seed)
        return local.suite

    def run_one(entry):
        scores = score_video(entry, suite_for_worker(), stride=args.stride, cache=cache)
        return ScoreRow.from_scores(scores, entry, args.stride)

    rows: dict[str, ScoreRow] = {}
    failures: dict[str, EvalError] = {}
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        futures = {entry.video_id: pool.submit(run_one, entry) for entry in manifest.videos}
        for video_id, future in futures.items():
            try:
                rows[video_id] = future.result()
            except EvalError as exc:
                failures[video_id] = exc

    echo = {
        "command": "score",
        "dataset_id": manifest.dataset_id,
        "stride": args.stride,
        "seed": args.seed,
        "cache": not args.no_cache,
        "backends": backend_factory.build_suite(config, seed=args.seed).describe(),
    }
    ordered = [rows[vid] for vid in manifest.video_ids() if vid in rows]
    write_atomic(args.out, scores_csv_bytes(ordered, config_echo=echo))
    print(f"wrote {len(ordered)} score rows to {args.out}")

    if failures:
        for video_id, exc in failures.items():
            print(f"failed: {video_id}: [{exc.code}] {exc}", file=sys.stderr)
        if any(isinstance(exc, BackendUnavailableError) for exc in failures.values()):
            return EXIT_BACKEND
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        manifest = _load_manifest(args.manifest)
        score_rows = read_scores_csv(args.scores)
        human = read_human_csv(args.human)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    fit_rows = []
    for row in score_rows:
        if row.video_id in human:
            fit_rows.append((row.stage_scores(), human[row.video_id]))
    try:
        optimization, validation = split_rows(manifest, fit_rows)
        result = fit_weights(optimization, method=args.method, temporal_form=args.temporal_form)
    except (RankDeficientError, TooFewSamplesError) as exc:
        return _fail(f"[{exc.code}] {exc}", EXIT_FIT)
    except (UnsplitVideoError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    result.save(args.out)
    w = result.weights
    print(
        f"fitted {result.method} weights: w1={w.w1:.6f} w2={w.w2:.6f} w3={w.w3:.6f} "
        f"intercept={w.intercept:.6f} ({result.n_samples} optimization rows, "
        f"loss={result.loss:.3e})"
    )
    if validation:
        print(f"validation loss over {len(validation)} rows: {evaluate_loss(validation, w):.3e}")
    else:
        print("validation split is empty; no validation loss")
    return EXIT_OK


def _read_metric_columns(path: str) -> tuple[dict[str, dict[str, float]], list[str]]:
    """Wide metrics CSV: first column is the label, remaining columns metrics."""
    import csv

    lines = [
        line for line in Path(path).read_text(encoding="utf-8").splitlines() if not line.startswith("#")
    ]
    reader = csv.DictReader(lines)
    if not reader.fieldnames or len(reader.fieldnames) < 2:
        raise ValueError(f"metrics file needs a label column plus metric columns: {path}")
    label_field = reader.fieldnames[0]
    metrics: dict[str, dict[str, float]] = {name: {} for name in reader.fieldnames[1:]}
    labels = []
    for record in reader:
        label = record[label_field]
        labels.append(label)
        for name in reader.fieldnames[1:]:
            metrics[name][label] = float(record[name])
    return metrics, labels


def cmd_correlate(args) -> int:
    try:
        metric_columns, _ = _read_metric_columns(args.metrics)
        human = read_human_csv(args.human)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    try:
        series = {
            name: align_series(values, human) for name, values in metric_columns.items()
        }
        table = correlation_table(series)
    except AlignmentError as exc:
        return _fail(f"[{exc.code}] {exc}", EXIT_ALIGNMENT)
    except EvalError as exc:
        return _fail(f"[{exc.code}] {exc}", EXIT_USAGE)

    out_path = Path(args.out)
    write_atomic(out_path, correlation_csv_bytes(table))
    structured = out_path.with_suffix(".json")
    write_atomic(structured, (json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    print(f"wrote correlation table to {out_path} and {structured}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        manifest = _load_manifest(args.manifest)
        score_rows = read_scores_csv(args.scores)
        fit = FitResult.load(args.weights)
        human = read_human_csv(args.human) if args.human else {}
    except (FileNotFoundError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    strides = sorted({row.stride for row in score_rows})
    config = {
        "stride": strides[0] if len(strides) == 1 else strides,
        "temporal_form": fit.weights.temporal_form,
        "fit_method": fit.method,
        "seed": args.seed,
    }
    report = build_report(
        dataset_id=manifest.dataset_id,
        rows=score_rows,
        weights=fit.weights,
        human_aggregates=human,
        config=config,
        generated_at=args.generated_at,
    )
    out_dir = Path(args.out_dir)
    write_atomic(out_dir / "report.md", render(report, FORMAT_MARKDOWN))
    write_atomic(out_dir / "report.json", render(report, FORMAT_STRUCTURED))
    write_atomic(out_dir / "report.csv", render(report, FORMAT_TABULAR))
    print(f"wrote report.md, report.json, report.csv to {out_dir}")
    if report.correlations is None:
        print(f"note: {report.correlation_note}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        manifest = _load_manifest(args.manifest)
    except (FileNotFoundError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        probe.close()
        return _fail(f"cannot bind {args.host}:{args.port}: {exc}", EXIT_PORT)
    probe.close()

    store = RatingStore(args.store_dir)
    service = RatingService(manifest, store)
    app = create_app(service, ui_dir=args.ui_dir)

    import uvicorn

    print(f"serving dataset '{manifest.dataset_id}' on http://{args.host}:{args.port}")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except KeyboardInterrupt:
        pass
    # Append-only store is flushed on every write; nothing else to persist.
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sstem",
        description="Video-editing evaluation: stage scoring, weight fitting, correlation reporting, and a human-rating service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score every video in a manifest")
    p_score.add_argument("--manifest", required=True)
    p_score.add_argument("--backends", help="backends config JSON; defaults to plain mocks")
    p_score.add_argument("--stride", type=int, default=1)
    p_score.add_argument("--workers", type=int, default=1)
    p_score.add_argument("--seed", type=int, default=None)
    p_score.add_argument("--cache-dir", default=".sstem-cache")
    p_score.add_argument("--no-cache", action="store_true")
    p_score.add_argument("--out", required=True)
    p_score.set_defaults(func=cmd_score)

    p_fit = sub.add_parser("fit", help="fit aggregation weights on the optimization split")
    p_fit.add_argument("--manifest", required=True)
    p_fit.add_argument("--scores", required=True)
    p_fit.add_argument("--human", required=True)
    p_fit.add_argument("--method", choices=list(FIT_METHODS), default=METHOD_OLS)
    p_fit.add_argument("--temporal-form", choices=list(TEMPORAL_FORMS), default=TEMPORAL_DIRECT)
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(func=cmd_fit)

    p_corr = sub.add_parser("correlate", help="correlate metric columns against human scores")
    p_corr.add_argument("--metrics", required=True, help="wide CSV: label column + one column per metric")
    p_corr.add_argument("--human", required=True)
    p_corr.add_argument("--out", required=True)
    p_corr.set_defaults(func=cmd_correlate)

    p_rep = sub.add_parser("report", help="assemble the evaluation report")
    p_rep.add_argument("--manifest", required=True)
    p_rep.add_argument("--scores", required=True)
    p_rep.add_argument("--weights", required=True)
    p_rep.add_argument("--human")
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--generated-at", default=None, help="override the report timestamp")
    p_rep.add_argument("--out-dir", required=True)
    p_rep.set_defaults(func=cmd_report)

    p_serve = sub.add_parser("serve", help="run the rating service")
    p_serve.add_argument("--manifest", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8040)
    p_serve.add_argument("--store-dir", required=True)
    p_serve.add_argument("--ui-dir", default=None, help="static UI bundle to serve at /")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches our contract
        return int(exc.code or 0)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
