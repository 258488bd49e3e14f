"""Adaptive per-shot clustering for candidate keyframe selection.

The partition of a shot's frames is found in three phases:

1. Greedy seeding: starting from an empty center set, repeatedly add the
   data point whose addition minimizes the total sum of squared distances
   (SSE) of every point to its nearest center, up to ``k_max = floor(sqrt(n))``
   centers. Assignments go to the nearest seed and each center is then
   finalized as the arithmetic mean of its members.
2. Agglomerative merging: repeatedly merge the two clusters whose centers
   are closest, replacing them by the mean of their pooled members, and
   score every intermediate partition with a silhouette coefficient.
3. Selection: keep the partition with the highest silhouette (ties prefer
   more clusters, i.e. the finer summary).

The silhouette here scores a point by ``(b - a) / max(a, b)`` where ``a``
is its mean distance to the other members of its own cluster and ``b`` is
its minimum distance to the *centers* of the other clusters. That center
form of ``b`` deviates from the textbook silhouette (mean distance to the
nearest cluster's points) on purpose; singletons score 0, as does the
degenerate ``a = b = 0`` case.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import isqrt

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True, eq=False)
class Clustering:
    """One partition of a shot's frames.

    ``centers[j]`` is the arithmetic mean of the points assigned to cluster
    ``j``; no cluster is empty. ``silhouette`` is None until scored (and
    stays None for single-cluster partitions, where it is undefined).
    ``seed_sse`` records the SSE trajectory of greedy seeding, one value
    per added center, when this object came straight from the seeder.
    """

    centers: np.ndarray  # (k, d) float64
    assignment: np.ndarray  # (n,) int64, values in [0, k)
    k: int
    silhouette: float | None
    seed_sse: tuple[float, ...] | None = None


@dataclass(frozen=True, eq=False)
class MergeTrace:
    """Scored snapshots of the merge loop, k descending one step at a time."""

    snapshots: tuple[Clustering, ...]

    def __post_init__(self):
        ks = [snap.k for snap in self.snapshots]
        if any(b != a - 1 for a, b in zip(ks, ks[1:])):
            raise ValueError(f"snapshot k values must decrease by 1, got {ks}")


def compute_sse(points: np.ndarray, centers: np.ndarray) -> float:
    """Sum of squared Euclidean distances of each point to its nearest center."""
    points = np.asarray(points, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if centers.size == 0 or centers.shape[0] == 0:
        raise ValueError("need at least one center")
    d2 = cdist(np.atleast_2d(points), np.atleast_2d(centers), "sqeuclidean")
    return float(d2.min(axis=1).sum())


def _pairwise_sq_dists(points: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", points, points)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _greedy_select(points: np.ndarray, k_max: int) -> tuple[list[int], list[float]]:
    """Pick k_max seed indices greedily by minimum added-center SSE.

    Returns the seed indices in selection order and the SSE after each
    addition. Ties go to the lowest frame index.
    """
    n = points.shape[0]
    d2 = _pairwise_sq_dists(points)
    best = np.full(n, np.inf)
    is_center = np.zeros(n, dtype=bool)
    seeds: list[int] = []
    sse_trace: list[float] = []
    cand_sse = np.empty(n)
    chunk = 2048  # bound the n x chunk temporary
    for _ in range(k_max):
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            cand_sse[lo:hi] = np.minimum(best[:, None], d2[:, lo:hi]).sum(axis=0)
        cand_sse[is_center] = np.inf
        c = int(np.argmin(cand_sse))
        seeds.append(c)
        is_center[c] = True
        np.minimum(best, d2[:, c], out=best)
        sse_trace.append(float(best.sum()))
    return seeds, sse_trace


def greedy_seed(points: np.ndarray, k_max: int) -> Clustering:
    """Seed up to ``k_max`` clusters by greedy SSE minimization.

    Every point is assigned to its nearest seed, seeds left without members
    (possible when the shot contains duplicate frames) are dropped, and the
    surviving centers are replaced by their cluster means.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k_max <= n:
        raise ValueError(f"k_max must be in [1, {n}], got {k_max}")

    seeds, sse_trace = _greedy_select(points, k_max)
    raw = np.argmin(cdist(points, points[seeds], "sqeuclidean"), axis=1)

    counts = np.bincount(raw, minlength=len(seeds))
    keep = np.flatnonzero(counts > 0)
    relabel = np.full(len(seeds), -1, dtype=np.int64)
    relabel[keep] = np.arange(len(keep))
    assignment = relabel[raw]

    k = len(keep)
    centers = np.zeros((k, points.shape[1]), dtype=np.float64)
    np.add.at(centers, assignment, points)
    centers /= counts[keep][:, None]
    return Clustering(centers, assignment, k, None, tuple(sse_trace))


def silhouette(points: np.ndarray, clustering: Clustering) -> float:
    """Mean silhouette over all points, center-based ``b`` variant.

    ``a(i)``: mean distance to the other members of i's cluster (0 for a
    singleton). ``b(i)``: minimum distance to the other cluster centers.
    ``S(i) = (b - a) / max(a, b)``, with singletons and the all-coincident
    ``max(a, b) = 0`` case scored 0.
    """
    if clustering.k < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    assignment = clustering.assignment

    a = np.zeros(n)
    for j in range(clustering.k):
        idx = np.flatnonzero(assignment == j)
        if len(idx) > 1:
            d = cdist(points[idx], points[idx])
            a[idx] = d.sum(axis=1) / (len(idx) - 1)

    to_centers = cdist(points, clustering.centers)
    to_centers[np.arange(n), assignment] = np.inf
    b = to_centers.min(axis=1)

    s = np.zeros(n)
    denom = np.maximum(a, b)
    ok = denom > 0
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    counts = np.bincount(assignment, minlength=clustering.k)
    s[counts[assignment] == 1] = 0.0
    return float(s.mean())


def merge_closest(clustering: Clustering, points: np.ndarray) -> Clustering:
    """Union the two clusters whose centers are closest.

    The merged cluster's center becomes the mean of the pooled members;
    every other cluster is left untouched and no point is reassigned.
    Distance ties pick the lexicographically smallest id pair.
    """
    if clustering.k < 2:
        raise ValueError("nothing to merge with fewer than 2 clusters")
    points = np.asarray(points, dtype=np.float64)

    d = cdist(clustering.centers, clustering.centers)
    iu = np.triu_indices(clustering.k, k=1)
    m = int(np.argmin(d[iu]))  # row-major scan: smallest p, then smallest q
    p, q = int(iu[0][m]), int(iu[1][m])

    assignment = clustering.assignment.copy()
    merged = (assignment == p) | (assignment == q)
    assignment[assignment == q] = p
    assignment[assignment > q] -= 1

    centers = np.delete(clustering.centers, q, axis=0)
    centers[p] = points[merged].mean(axis=0)
    return Clustering(centers, assignment, clustering.k - 1, None)


def build_merge_trace(points: np.ndarray, seed: Clustering) -> MergeTrace:
    """Score the seeded partition, then merge down to k = 2, scoring each step."""
    if seed.k < 2:
        raise ValueError("merge trace needs a seed with k >= 2")
    points = np.asarray(points, dtype=np.float64)
    current = replace(seed, silhouette=silhouette(points, seed))
    snaps = [current]
    while current.k > 2:
        current = merge_closest(current, points)
        current = replace(current, silhouette=silhouette(points, current))
        snaps.append(current)
    return MergeTrace(tuple(snaps))


def adaptive_cluster(points: np.ndarray) -> Clustering:
    """Cluster one shot's frames with an automatically chosen cluster count.

    Seeds ``floor(sqrt(n))`` clusters greedily, merges down to 2 while
    scoring every partition, and returns the snapshot with the highest
    silhouette (ties keep the larger k). Shots of up to 3 frames, or shots
    whose frames are all identical, come back as a single cluster with an
    undefined (None) silhouette.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        raise ValueError("cannot cluster an empty shot")

    k_max = max(1, isqrt(n))
    if k_max == 1:
        return Clustering(
            points.mean(axis=0, keepdims=True),
            np.zeros(n, dtype=np.int64),
            1,
            None,
        )

    seed = greedy_seed(points, k_max)
    if seed.k < 2:
        return seed

    trace = build_merge_trace(points, seed)
    best = trace.snapshots[0]
    for snap in trace.snapshots[1:]:
        if snap.silhouette > best.silhouette:
            best = snap
    return best


def select_candidates(
    clustering: Clustering, points: np.ndarray, shot_start: int = 0
) -> list[int]:
    """Global index of the member frame nearest each cluster center.

    Distance ties go to the lowest frame index; the result is sorted by
    global frame index.
    """
    points = np.asarray(points, dtype=np.float64)
    out = []
    for j in range(clustering.k):
        idx = np.flatnonzero(clustering.assignment == j)
        dist = np.linalg.norm(points[idx] - clustering.centers[j], axis=1)
        out.append(int(idx[np.argmin(dist)]) + shot_start)
    return sorted(out)


def validate_clustering(
    clustering: Clustering, points: np.ndarray, tol: float = 1e-6
) -> None:
    """Assert the structural invariants of a Clustering against its points."""
    points = np.asarray(points, dtype=np.float64)
    assignment = clustering.assignment
    if assignment.shape[0] != points.shape[0]:
        raise AssertionError("assignment length != point count")
    if assignment.min() < 0 or assignment.max() >= clustering.k:
        raise AssertionError("assignment id out of range")
    counts = np.bincount(assignment, minlength=clustering.k)
    if (counts == 0).any():
        raise AssertionError("empty cluster")
    for j in range(clustering.k):
        mean = points[assignment == j].mean(axis=0)
        if not np.allclose(mean, clustering.centers[j], atol=tol, rtol=0):
            raise AssertionError(f"center {j} is not the mean of its members")
