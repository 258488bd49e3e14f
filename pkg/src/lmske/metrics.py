"""Summary quality metrics: F1 against a benchmark, fidelity, compression.

A benchmark match is decided by color-histogram similarity: extracted and
benchmark frames are paired greedily, best pair first, one-to-one, while
the pair similarity is at least the match threshold (0.8, the same notion
of "same content" the redundancy stage uses). F1 combines the precision
and recall of that matching. Fidelity is the worst-case coverage of the
video: one minus the largest distance from any frame to its nearest
keyframe, with distance = 1 - similarity. Compression ratio rewards
smaller summaries: ``1 - keyframes / frames``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interchange import KeyframeSet
from .redundancy import DEFAULT_SIMILARITY_THRESHOLD, histogram_similarity

MATCH_THRESHOLD = DEFAULT_SIMILARITY_THRESHOLD


@dataclass(frozen=True)
class EvalReport:
    f1: float
    precision: float
    recall: float
    fidelity: float
    cr: float
    matches: tuple[tuple[int, int], ...] = ()

    def as_dict(self) -> dict:
        return {
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "fidelity": self.fidelity,
            "cr": self.cr,
            "matches": [list(pair) for pair in self.matches],
        }


def match_keyframes(
    extracted: KeyframeSet,
    benchmark: KeyframeSet,
    histograms: np.ndarray,
    threshold: float = MATCH_THRESHOLD,
) -> list[tuple[int, int]]:
    """Greedy one-to-one pairing of extracted and benchmark frames.

    Repeatedly takes the remaining (extracted, benchmark) pair with the
    highest histogram similarity, while that similarity is at least
    ``threshold``. Ties break on the lower extracted index, then the lower
    benchmark index. Each frame is used at most once.
    """
    if not extracted.indices or not benchmark.indices:
        return []
    histograms = np.asarray(histograms, dtype=np.int64)
    ne, nb = len(extracted.indices), len(benchmark.indices)
    sim = np.empty((ne, nb))
    for i, e_idx in enumerate(extracted.indices):
        for j, b_idx in enumerate(benchmark.indices):
            sim[i, j] = histogram_similarity(histograms[e_idx], histograms[b_idx])

    pairs = []
    while True:
        flat = int(np.argmax(sim))  # row-major: lowest extracted, then benchmark
        i, j = divmod(flat, nb)
        if sim[i, j] < threshold:
            break
        pairs.append((extracted.indices[i], benchmark.indices[j]))
        sim[i, :] = -1.0
        sim[:, j] = -1.0
    return pairs


def f1(num_matches: int, num_extracted: int, num_benchmark: int) -> float:
    """F1 of a matching; any zero denominator yields 0."""
    p = precision(num_matches, num_extracted)
    r = recall(num_matches, num_benchmark)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def precision(num_matches: int, num_extracted: int) -> float:
    return num_matches / num_extracted if num_extracted > 0 else 0.0


def recall(num_matches: int, num_benchmark: int) -> float:
    return num_matches / num_benchmark if num_benchmark > 0 else 0.0


def fidelity(all_frame_histograms: np.ndarray, extracted: KeyframeSet) -> float:
    """Worst-frame coverage of the video by the keyframe set, in [0, 1].

    1 minus the largest, over all frames, of the smallest histogram
    distance (1 - similarity) to any keyframe. Empty keyframe sets are
    defined as 0.
    """
    if not extracted.indices:
        return 0.0
    h = np.asarray(all_frame_histograms, dtype=np.int64)
    totals = h.sum(axis=1)
    if (totals <= 0).any():
        raise ValueError("histogram with zero total")
    best = np.full(h.shape[0], -1.0)
    for k_idx in extracted.indices:
        key = h[k_idx]
        t_key = int(totals[k_idx])
        num = np.minimum(h * t_key, key * totals[:, None]).sum(axis=1)
        np.maximum(best, num / (totals * t_key), out=best)
    return float(best.min())


def compression_ratio(total_frames: int, num_keyframes: int) -> float:
    """``1 - k / l``; larger means a terser summary."""
    if total_frames < 1:
        raise ValueError("total_frames must be >= 1")
    if not 0 <= num_keyframes <= total_frames:
        raise ValueError(
            f"num_keyframes must be in [0, {total_frames}], got {num_keyframes}"
        )
    return (total_frames - num_keyframes) / total_frames


def evaluate_video(
    extracted: KeyframeSet,
    benchmark: KeyframeSet,
    all_frame_histograms: np.ndarray,
    total_frames: int,
    threshold: float = MATCH_THRESHOLD,
) -> EvalReport:
    """Full per-video report: matching, F1 components, fidelity, CR."""
    pairs = match_keyframes(extracted, benchmark, all_frame_histograms, threshold)
    m = len(pairs)
    return EvalReport(
        f1=f1(m, len(extracted.indices), len(benchmark.indices)),
        precision=precision(m, len(extracted.indices)),
        recall=recall(m, len(benchmark.indices)),
        fidelity=fidelity(all_frame_histograms, extracted),
        cr=compression_ratio(total_frames, len(extracted.indices)),
        matches=tuple(pairs),
    )


def evaluate_dataset(reports: list[EvalReport]) -> EvalReport:
    """Unweighted per-metric mean over per-video reports."""
    if not reports:
        raise ValueError("need at least one per-video report")
    n = len(reports)
    return EvalReport(
        f1=sum(r.f1 for r in reports) / n,
        precision=sum(r.precision for r in reports) / n,
        recall=sum(r.recall for r in reports) / n,
        fidelity=sum(r.fidelity for r in reports) / n,
        cr=sum(r.cr for r in reports) / n,
    )
