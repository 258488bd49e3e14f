"""Command-line interface binding the pipeline and metrics to files on disk.

Subcommands:
    extract            run keyframe extraction on interchange files
    evaluate           score an extracted keyframe set against a benchmark
    gen-synth          generate a deterministic synthetic test video
    features-fallback  compute histogram features from a frame manifest

Every command is deterministic given identical inputs, seed, and config,
and exits 0 only when all outputs were written and validated. Input
problems exit nonzero with a categorized ``error: <role>: ...`` message.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import synth
from .frames import (
    FrameFormatError,
    compute_histogram,
    fallback_features,
    load_frame,
    load_manifest,
)
from .interchange import (
    InterchangeError,
    KeyframeSet,
    load_features,
    load_keyframes,
    load_shots,
    write_features,
    write_keyframes,
)
from .metrics import EvalReport, evaluate_dataset, evaluate_video
from .pipeline import PipelineConfig, summarize_video


class CliError(Exception):
    """Input problem with a user-facing, role-prefixed message."""


def _require_file(role: str, path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{role}: not found: {path}")
    return p


def _load(role: str, loader, path: str):
    p = _require_file(role, path)
    try:
        return loader(p)
    except (InterchangeError, FrameFormatError, OSError) as exc:
        raise CliError(f"{role}: {exc}") from exc


def _histograms_from_manifest(role: str, manifest_path: str) -> np.ndarray:
    frame_paths = _load(role, load_manifest, manifest_path)
    if not frame_paths:
        raise CliError(f"{role}: manifest {manifest_path} lists no frames")
    hists = []
    for fp in frame_paths:
        if not fp.is_file():
            raise CliError(f"{role}: not found: {fp}")
        try:
            hists.append(compute_histogram(load_frame(fp)))
        except (FrameFormatError, OSError) as exc:
            raise CliError(f"{role}: {exc}") from exc
    return np.stack(hists)


def _build_config(args) -> PipelineConfig:
    values = {}
    if args.threshold is not None:
        values["redundancy_threshold"] = args.threshold
    if args.config is not None:
        cfg_path = _require_file("config", args.config)
        try:
            overrides = json.loads(cfg_path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"config: not valid JSON: {exc}") from exc
        allowed = set(PipelineConfig().as_dict())
        unknown = set(overrides) - allowed
        if unknown:
            raise CliError(f"config: unknown keys {sorted(unknown)}")
        values.update(overrides)  # config file wins over flags
    try:
        return PipelineConfig(**values)
    except ValueError as exc:
        raise CliError(f"config: {exc}") from exc


def _cmd_extract(args) -> int:
    features = _load("features", load_features, args.features)
    shots = _load("shots", load_shots, args.shots)
    histograms = _histograms_from_manifest("frames", args.frames)
    config = _build_config(args)

    if shots.total_frames != features.shape[0]:
        raise CliError(
            f"shape: shots cover {shots.total_frames} frames but features "
            f"have {features.shape[0]} rows"
        )
    if histograms.shape[0] != features.shape[0]:
        raise CliError(
            f"shape: manifest lists {histograms.shape[0]} frames but features "
            f"have {features.shape[0]} rows"
        )

    summary = summarize_video(features, shots, histograms, config, jobs=args.jobs)
    write_keyframes(summary.keyframes, args.out)

    report = {
        "config": config.as_dict(),
        "total_frames": int(features.shape[0]),
        "keyframes": list(summary.keyframes.indices),
        "shots": [
            {
                "start": r.start,
                "end": r.end,
                "k": r.k,
                "silhouette": r.silhouette,
                "candidates": list(r.candidates),
                "keyframes": list(r.keyframes),
            }
            for r in summary.shot_reports
        ],
    }
    report_path = args.report or f"{args.out}.report.json"
    Path(report_path).write_text(json.dumps(report, indent=2) + "\n")
    print(
        f"extracted {len(summary.keyframes)} keyframes from "
        f"{features.shape[0]} frames -> {args.out}"
    )
    return 0


def _evaluate_one(
    extracted_path: Path, benchmark_path: Path, manifest_path: Path
) -> EvalReport:
    extracted = _load("extracted", load_keyframes, str(extracted_path))
    benchmark = _load("benchmark", load_keyframes, str(benchmark_path))
    histograms = _histograms_from_manifest("frames", str(manifest_path))
    total = histograms.shape[0]
    for role, kf in (("extracted", extracted), ("benchmark", benchmark)):
        if kf.indices and kf.indices[-1] >= total:
            raise CliError(
                f"{role}: index {kf.indices[-1]} out of range for {total} frames"
            )
    return evaluate_video(extracted, benchmark, histograms, total)


def _dataset_videos(args) -> list[tuple[str, Path, Path, Path]]:
    """Pair up per-video files across the three dataset directories.

    Convention: ``<extracted>/<video>.json``, ``<benchmark>/<video>.json``,
    ``<frames>/<video>.txt`` (a frame manifest), matched by stem.
    """
    ex_dir, bm_dir, fr_dir = Path(args.extracted), Path(args.benchmark), Path(args.frames)
    videos = []
    for ex_file in sorted(ex_dir.glob("*.json")):
        stem = ex_file.name[: -len(".json")]
        bm_file = bm_dir / ex_file.name
        manifest = fr_dir / f"{stem}.txt"
        if not bm_file.is_file():
            raise CliError(f"benchmark: not found: {bm_file}")
        if not manifest.is_file():
            raise CliError(f"frames: not found: {manifest}")
        videos.append((stem, ex_file, bm_file, manifest))
    if not videos:
        raise CliError(f"extracted: no *.json keyframe files in {ex_dir}")
    return videos


def _cmd_evaluate(args) -> int:
    paths = (args.extracted, args.benchmark, args.frames)
    if all(Path(p).is_dir() for p in paths):
        rows = []
        reports = []
        for name, ex_file, bm_file, manifest in _dataset_videos(args):
            report = _evaluate_one(ex_file, bm_file, manifest)
            reports.append(report)
            rows.append({"name": name, **report.as_dict()})
        average = evaluate_dataset(reports)
        doc = {"videos": rows, "average": average.as_dict()}
        summary = average
        label = f"average over {len(rows)} videos"
    else:
        report = _evaluate_one(
            _require_file("extracted", args.extracted),
            _require_file("benchmark", args.benchmark),
            _require_file("frames", args.frames),
        )
        doc = report.as_dict()
        summary = report
        label = "video"

    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(
        f"{label}: F1={summary.f1:.4f} fidelity={summary.fidelity:.4f} "
        f"CR={summary.cr:.4f} -> {args.out}"
    )
    return 0


def _cmd_gen_synth(args) -> int:
    if args.shots < 1 or args.frames_per_shot < 1:
        raise CliError("gen-synth: --shots and --frames-per-shot must be >= 1")
    try:
        info = synth.generate(args.out, args.shots, args.frames_per_shot, args.seed)
    except OSError as exc:
        raise CliError(f"out: {exc}") from exc
    print(
        f"wrote {info['total_frames']} frames in {info['num_shots']} shots "
        f"to {info['out_dir']}"
    )
    return 0


def _cmd_features_fallback(args) -> int:
    frame_paths = _load("frames", load_manifest, args.frames)
    if not frame_paths:
        raise CliError(f"frames: manifest {args.frames} lists no frames")
    images = []
    for fp in frame_paths:
        if not fp.is_file():
            raise CliError(f"frames: not found: {fp}")
        try:
            images.append(load_frame(fp))
        except (FrameFormatError, OSError) as exc:
            raise CliError(f"frames: {exc}") from exc
    write_features(fallback_features(images), args.out)
    print(f"wrote {len(images)}x512 fallback features -> {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmske",
        description="Sequential keyframe extraction and summary evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract keyframes from interchange files")
    p.add_argument("--features", required=True, help="binary feature file")
    p.add_argument("--shots", required=True, help="shot boundary JSON file")
    p.add_argument("--frames", required=True, help="frame manifest")
    p.add_argument("--out", required=True, help="output keyframe JSON file")
    p.add_argument("--threshold", type=float, default=None,
                   help="redundancy similarity threshold (default 0.8)")
    p.add_argument("--config", default=None,
                   help="JSON config file; its values override flags")
    p.add_argument("--report", default=None,
                   help="run report path (default: <out>.report.json)")
    p.add_argument("--jobs", type=int, default=1,
                   help="process shots on this many threads")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("evaluate", help="score extracted keyframes against a benchmark")
    p.add_argument("--extracted", required=True,
                   help="extracted keyframe file, or directory of <video>.json")
    p.add_argument("--benchmark", required=True,
                   help="benchmark keyframe file, or directory of <video>.json")
    p.add_argument("--frames", required=True,
                   help="frame manifest, or directory of <video>.txt manifests")
    p.add_argument("--out", required=True, help="output report JSON file")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("gen-synth", help="generate a synthetic test video")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--frames-per-shot", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen_synth)

    p = sub.add_parser("features-fallback",
                       help="compute histogram features from a frame manifest")
    p.add_argument("--frames", required=True, help="frame manifest")
    p.add_argument("--out", required=True, help="output feature file")
    p.set_defaults(func=_cmd_features_fallback)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InterchangeError, FrameFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: i/o: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
