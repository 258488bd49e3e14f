"""Shot-by-shot keyframe extraction, stitched into one video summary.

Each shot is clustered adaptively, the frame nearest each cluster center
becomes a candidate, redundancy elimination prunes the candidates, and
the per-shot results are concatenated in shot order. Shots are fully
independent, so a shot of nothing but solid-color frames legally
contributes an empty set without disturbing its neighbours.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clustering import adaptive_cluster, select_candidates
from .interchange import KeyframeSet, ShotList
from .redundancy import (
    DEFAULT_MIN_NONZERO_BINS,
    DEFAULT_SIMILARITY_THRESHOLD,
    eliminate,
)


@dataclass(frozen=True)
class PipelineConfig:
    """Tunables for one extraction run.

    ``l2_normalize_features`` rescales every feature row to unit length at
    ingestion so Euclidean distances track cosine similarity on embedding
    vectors. The silhouette tie rule is fixed: prefer the larger k.
    """

    redundancy_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    min_nonzero_bins: int = DEFAULT_MIN_NONZERO_BINS
    l2_normalize_features: bool = True
    sc_tie_rule: str = "prefer larger k"

    def __post_init__(self):
        if not 0.0 < self.redundancy_threshold <= 1.0:
            raise ValueError(
                f"redundancy_threshold must be in (0, 1], got {self.redundancy_threshold}"
            )
        if self.min_nonzero_bins < 1:
            raise ValueError(
                f"min_nonzero_bins must be >= 1, got {self.min_nonzero_bins}"
            )
        if self.sc_tie_rule != "prefer larger k":
            raise ValueError(f"unsupported sc_tie_rule {self.sc_tie_rule!r}")

    def as_dict(self) -> dict:
        return {
            "redundancy_threshold": self.redundancy_threshold,
            "min_nonzero_bins": self.min_nonzero_bins,
            "l2_normalize_features": self.l2_normalize_features,
            "sc_tie_rule": self.sc_tie_rule,
        }


@dataclass(frozen=True)
class ShotReport:
    """What happened inside one shot: chosen k, its score, and the output."""

    start: int
    end: int
    k: int
    silhouette: float | None
    candidates: tuple[int, ...]
    keyframes: tuple[int, ...]


@dataclass(frozen=True)
class VideoSummary:
    keyframes: KeyframeSet
    shot_reports: tuple[ShotReport, ...] = field(default_factory=tuple)


def normalize_rows(features: np.ndarray) -> np.ndarray:
    """L2-normalize feature rows; all-zero rows are left unchanged."""
    features = np.asarray(features, dtype=np.float64)
    norms = np.linalg.norm(features, axis=1, keepdims=True)
    return features / np.where(norms == 0.0, 1.0, norms)


def run_shot(
    features: np.ndarray,
    histograms: np.ndarray,
    shot_start: int,
    config: PipelineConfig = PipelineConfig(),
) -> list[int]:
    """Extract the keyframe indices (global) of a single shot.

    ``features`` and ``histograms`` carry one row per frame of the shot,
    aligned one-to-one; ``shot_start`` is the global index of row 0.
    """
    features = np.asarray(features, dtype=np.float64)
    histograms = np.asarray(histograms)
    if features.shape[0] == 0:
        raise ValueError("empty shot")
    if features.shape[0] != histograms.shape[0]:
        raise ValueError(
            f"features ({features.shape[0]} rows) and histograms "
            f"({histograms.shape[0]} rows) are misaligned"
        )
    clustering = adaptive_cluster(features)
    candidates = select_candidates(clustering, features, shot_start)
    return eliminate(
        [(idx, histograms[idx - shot_start]) for idx in candidates],
        threshold=config.redundancy_threshold,
        min_nonzero_bins=config.min_nonzero_bins,
    )


def _process_shot(
    features: np.ndarray,
    histograms: np.ndarray,
    start: int,
    end: int,
    config: PipelineConfig,
) -> ShotReport:
    shot_features = features[start : end + 1]
    clustering = adaptive_cluster(shot_features)
    candidates = select_candidates(clustering, shot_features, start)
    kept = eliminate(
        [(idx, histograms[idx]) for idx in candidates],
        threshold=config.redundancy_threshold,
        min_nonzero_bins=config.min_nonzero_bins,
    )
    return ShotReport(
        start=start,
        end=end,
        k=clustering.k,
        silhouette=clustering.silhouette,
        candidates=tuple(candidates),
        keyframes=tuple(kept),
    )


def summarize_video(
    features: np.ndarray,
    shots: ShotList,
    histograms: np.ndarray,
    config: PipelineConfig = PipelineConfig(),
    jobs: int = 1,
) -> VideoSummary:
    """Run every shot and concatenate the results in shot order.

    Shots are independent; with ``jobs > 1`` they run on a thread pool,
    and the output is merged in shot order either way.
    """
    features = np.asarray(features, dtype=np.float64)
    histograms = np.asarray(histograms)
    n = features.shape[0]
    if shots.total_frames != n:
        raise ValueError(
            f"shots cover {shots.total_frames} frames but features have {n} rows"
        )
    if histograms.shape[0] != n:
        raise ValueError(
            f"histograms have {histograms.shape[0]} rows, expected {n}"
        )
    if config.l2_normalize_features:
        features = normalize_rows(features)

    if jobs > 1 and len(shots) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(
                pool.map(
                    lambda se: _process_shot(features, histograms, *se, config),
                    shots,
                )
            )
    else:
        reports = [
            _process_shot(features, histograms, start, end, config)
            for start, end in shots
        ]

    per_shot = tuple(r.keyframes for r in reports)
    indices = tuple(i for group in per_shot for i in group)
    return VideoSummary(KeyframeSet(indices, per_shot), tuple(reports))


def run_video(
    features: np.ndarray,
    shots: ShotList,
    histograms: np.ndarray,
    config: PipelineConfig = PipelineConfig(),
) -> KeyframeSet:
    """Keyframe set of a whole video; see :func:`summarize_video` for details."""
    return summarize_video(features, shots, histograms, config).keyframes
