"""Candidate keyframe post-filtering: uninformative frames and near-duplicates.

A frame whose HSV histogram populates fewer than 10 bins is treated as
solid-color or otherwise uninformative and dropped outright. The survivors
are then pruned pairwise: while the most similar remaining pair is at or
above the similarity threshold (0.8 by default), the later frame of the
pair is deleted, so the first occurrence of repeated content always wins.

Similarity is the intersection of the two L1-normalized histograms,
computed exactly in integer arithmetic: identical frames score exactly
1.0 and frames with disjoint color content score exactly 0.0.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SIMILARITY_THRESHOLD = 0.8
DEFAULT_MIN_NONZERO_BINS = 10


def is_uninformative(hist: np.ndarray, min_nonzero_bins: int = DEFAULT_MIN_NONZERO_BINS) -> bool:
    """True when fewer than ``min_nonzero_bins`` histogram bins are populated."""
    return int(np.count_nonzero(hist)) < min_nonzero_bins


def histogram_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection of two L1-normalized count histograms, in [0, 1].

    Evaluated as ``sum(min(a_i * |b|, b_i * |a|)) / (|a| * |b|)`` so the
    numerator stays integer-exact.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    ta = int(a.sum())
    tb = int(b.sum())
    if ta <= 0 or tb <= 0:
        raise ValueError("histogram with zero total")
    num = int(np.minimum(a * tb, b * ta).sum())
    return num / (ta * tb)


def similarity_matrix(hists: np.ndarray) -> np.ndarray:
    """Pairwise normalized-intersection matrix over rows of count histograms."""
    h = np.asarray(hists, dtype=np.int64)
    totals = h.sum(axis=1)
    if (totals <= 0).any():
        raise ValueError("histogram with zero total")
    n = h.shape[0]
    sim = np.ones((n, n))
    for i in range(n):
        num = np.minimum(h[i] * totals[:, None], h * totals[i]).sum(axis=1)
        sim[i] = num / (totals * int(totals[i]))
    return sim


def eliminate(
    candidates: list[tuple[int, np.ndarray]],
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    min_nonzero_bins: int = DEFAULT_MIN_NONZERO_BINS,
) -> list[int]:
    """Prune a sorted candidate list down to mutually dissimilar keyframes.

    ``candidates`` holds (global frame index, histogram) pairs in temporal
    order. Uninformative candidates are removed first; then, while any pair
    is at least ``threshold`` similar, the most similar pair (ties: smallest
    earlier index, then smallest later index) loses its later frame.

    Returns the surviving frame indices in temporal order. Every surviving
    pair is strictly below the threshold.
    """
    kept = [(idx, hist) for idx, hist in candidates
            if not is_uninformative(hist, min_nonzero_bins)]
    if len(kept) <= 1:
        return [idx for idx, _ in kept]

    indices = [idx for idx, _ in kept]
    sim = similarity_matrix(np.stack([hist for _, hist in kept]))
    n = len(kept)
    masked = np.full((n, n), -1.0)
    iu = np.triu_indices(n, k=1)
    masked[iu] = sim[iu]

    alive = np.ones(n, dtype=bool)
    while alive.sum() > 1:
        flat = int(np.argmax(masked))  # row-major: smallest i, then smallest j
        i, j = divmod(flat, n)
        if masked[i, j] < threshold:
            break
        alive[j] = False
        masked[j, :] = -1.0
        masked[:, j] = -1.0
    return [indices[i] for i in range(n) if alive[i]]
