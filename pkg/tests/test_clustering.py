import math

import numpy as np
import pytest

from lmske.clustering import (
    Clustering,
    MergeTrace,
    adaptive_cluster,
    build_merge_trace,
    compute_sse,
    greedy_seed,
    merge_closest,
    select_candidates,
    silhouette,
    validate_clustering,
)


# -- independent oracles ----------------------------------------------------

def sse_oracle(points, centers):
    """Naive double loop: nearest-center squared distance, summed."""
    total = 0.0
    for x in points:
        best = math.inf
        for c in centers:
            d2 = sum((xi - ci) ** 2 for xi, ci in zip(x, c))
            best = min(best, d2)
        total += best
    return total


def silhouette_oracle(points, assignment, centers):
    """Straight transcription of the score: a = mean distance to own
    cluster's other members, b = min distance to the other centers,
    S = (b - a) / max(a, b), averaged over points."""
    n = len(points)
    k = len(centers)
    scores = []
    for i in range(n):
        own = assignment[i]
        members = [j for j in range(n) if assignment[j] == own and j != i]
        if not members:
            scores.append(0.0)
            continue
        a = sum(math.dist(points[i], points[j]) for j in members) / len(members)
        b = min(
            math.dist(points[i], centers[c]) for c in range(k) if c != own
        )
        m = max(a, b)
        scores.append((b - a) / m if m > 0 else 0.0)
    return sum(scores) / n


def lloyd_kmeans(points, k, rng, n_init=10, iters=100):
    """Plain k-means with random restarts, used only as a test oracle."""
    best_centers, best_assign, best_sse = None, None, math.inf
    n = len(points)
    for _ in range(n_init):
        centers = points[rng.choice(n, size=k, replace=False)].copy()
        for _ in range(iters):
            d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            assign = d2.argmin(axis=1)
            new_centers = centers.copy()
            for j in range(k):
                if (assign == j).any():
                    new_centers[j] = points[assign == j].mean(axis=0)
            if np.allclose(new_centers, centers):
                break
            centers = new_centers
        if len(np.unique(assign)) < k:
            continue
        sse = sse_oracle(points, centers)
        if sse < best_sse:
            best_centers, best_assign, best_sse = centers, assign, sse
    return best_centers, best_assign


# -- compute_sse ------------------------------------------------------------

def test_sse_zero_when_points_equal_center():
    pts = np.full((5, 3), 2.0)
    assert compute_sse(pts, np.array([[2.0, 2.0, 2.0]])) == 0.0


def test_sse_hand_arithmetic():
    pts = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert compute_sse(pts, np.array([[0.0, 0.0]])) == 4.0


def test_sse_matches_oracle_on_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(25):
        pts = rng.normal(size=(20, 4))
        centers = rng.normal(size=(int(rng.integers(1, 6)), 4))
        assert compute_sse(pts, centers) == pytest.approx(
            sse_oracle(pts, centers), abs=1e-9
        )


def test_sse_rejects_empty_centers():
    with pytest.raises(ValueError):
        compute_sse(np.ones((3, 2)), np.empty((0, 2)))


# -- greedy_seed ------------------------------------------------------------

def test_greedy_seed_four_point_line():
    pts = np.array([[0.0], [1.0], [10.0], [11.0]])
    result = greedy_seed(pts, 2)
    # first seed is the 1-center SSE minimizer (value 1, tie broken to the
    # lower index); second lands in the opposite pair; centers become the
    # cluster means, so the final SSE is 1.0
    assert result.seed_sse == (182.0, 2.0)
    assert result.k == 2
    assert sorted(result.centers.ravel().tolist()) == [0.5, 10.5]
    assert compute_sse(pts, result.centers) == 1.0
    validate_clustering(result, pts)


def test_greedy_seed_kmax_equals_n():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(7, 3))
    result = greedy_seed(pts, 7)
    assert result.k == 7
    assert result.seed_sse[-1] == 0.0
    assert compute_sse(pts, result.centers) == 0.0


def test_greedy_seed_sse_trace_monotone():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        pts = rng.normal(size=(n, int(rng.integers(1, 6))))
        trace = greedy_seed(pts, n).seed_sse
        assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_greedy_seed_duplicates_collapse():
    pts = np.tile(np.array([[1.0, 2.0]]), (9, 1))
    result = greedy_seed(pts, 3)
    assert result.k == 1
    assert np.array_equal(result.assignment, np.zeros(9, dtype=np.int64))
    validate_clustering(result, pts)


def test_greedy_seed_kmax_out_of_range():
    pts = np.ones((3, 2))
    with pytest.raises(ValueError):
        greedy_seed(pts, 0)
    with pytest.raises(ValueError):
        greedy_seed(pts, 4)


# -- silhouette -------------------------------------------------------------

def test_silhouette_two_far_blobs():
    rng = np.random.default_rng(3)
    pts = np.vstack(
        [rng.normal(0.0, 0.01, (10, 2)), rng.normal(5.0, 0.01, (10, 2))]
    )
    c = greedy_seed(pts, 2)
    assert silhouette(pts, c) > 0.9


def test_silhouette_identical_points_scores_zero():
    pts = np.zeros((6, 2))
    assignment = np.array([0, 0, 0, 1, 1, 1])
    c = Clustering(np.zeros((2, 2)), assignment, 2, None)
    assert silhouette(pts, c) == 0.0


def test_silhouette_singletons_score_zero():
    pts = np.array([[0.0], [10.0]])
    c = Clustering(pts.copy(), np.array([0, 1]), 2, None)
    assert silhouette(pts, c) == 0.0


def test_silhouette_matches_oracle_on_random_instances():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(10, 60))
        d = int(rng.integers(1, 5))
        k = int(rng.integers(2, 7))
        pts = rng.normal(size=(n, d))
        # random assignment with every cluster populated by >= 2 points
        assignment = np.concatenate(
            [np.repeat(np.arange(k), 2), rng.integers(0, k, size=n - 2 * k)]
        )
        rng.shuffle(assignment)
        centers = np.stack([pts[assignment == j].mean(axis=0) for j in range(k)])
        c = Clustering(centers, assignment, k, None)
        assert silhouette(pts, c) == pytest.approx(
            silhouette_oracle(pts, assignment, centers), abs=1e-9
        )


def test_silhouette_requires_two_clusters():
    pts = np.ones((4, 2))
    c = Clustering(np.ones((1, 2)), np.zeros(4, dtype=np.int64), 1, None)
    with pytest.raises(ValueError):
        silhouette(pts, c)


# -- merge_closest ----------------------------------------------------------

def _three_cluster_line():
    pts = np.array([[0.0], [0.0], [1.0], [1.0], [10.0], [10.0]])
    assignment = np.array([0, 0, 1, 1, 2, 2])
    centers = np.array([[0.0], [1.0], [10.0]])
    return pts, Clustering(centers, assignment, 3, None)


def test_merge_closest_picks_nearest_pair():
    pts, c = _three_cluster_line()
    merged = merge_closest(c, pts)
    assert merged.k == 2
    # clusters at 0 and 1 merge; their pooled mean is 0.5
    assert merged.centers[0, 0] == 0.5
    assert merged.centers[1, 0] == 10.0
    assert np.array_equal(merged.assignment, [0, 0, 0, 0, 1, 1])
    validate_clustering(merged, pts)


def test_merge_closest_mean_of_union():
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [4.0, 0.0], [4.0, 0.0]])
    c = Clustering(
        np.array([[0.0, 0.0], [4.0, 0.0]]), np.array([0, 0, 1, 1]), 2, None
    )
    merged = merge_closest(c, pts)
    assert merged.k == 1
    assert np.array_equal(merged.centers, [[2.0, 0.0]])


def test_merge_closest_preserves_membership_counts():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(30, 3))
    c = greedy_seed(pts, 5)
    merged = merge_closest(c, pts)
    assert merged.assignment.shape == c.assignment.shape
    assert np.bincount(merged.assignment).sum() == 30
    assert (np.bincount(merged.assignment, minlength=merged.k) > 0).all()
    validate_clustering(merged, pts)


def test_merge_closest_requires_two_clusters():
    pts = np.ones((4, 2))
    c = Clustering(np.ones((1, 2)), np.zeros(4, dtype=np.int64), 1, None)
    with pytest.raises(ValueError):
        merge_closest(c, pts)


# -- adaptive_cluster -------------------------------------------------------

def test_adaptive_cluster_single_frame():
    result = adaptive_cluster(np.array([[3.0, 4.0]]))
    assert result.k == 1
    assert result.silhouette is None
    assert np.array_equal(result.assignment, [0])


def test_adaptive_cluster_small_shots_stay_single():
    for n in (1, 2, 3):
        result = adaptive_cluster(np.random.default_rng(n).normal(size=(n, 2)))
        assert result.k == 1
        assert result.silhouette is None


def test_adaptive_cluster_rejects_empty():
    with pytest.raises(ValueError):
        adaptive_cluster(np.empty((0, 2)))


def test_adaptive_cluster_three_blobs_agrees_with_kmeans_oracle():
    rng = np.random.default_rng(6)
    pts = np.vstack(
        [rng.normal(center, 0.05, (12, 2)) for center in [(0, 0), (1, 0), (0, 1)]]
    )
    result = adaptive_cluster(pts)

    best_k, best_sc = None, -math.inf
    for k in range(2, 7):
        centers, assign = lloyd_kmeans(pts, k, np.random.default_rng(100 + k))
        if centers is None:
            continue
        sc = silhouette(pts, Clustering(centers, assign, k, None))
        if sc > best_sc:
            best_k, best_sc = k, sc
    assert best_k == 3
    assert result.k == 3


def test_adaptive_cluster_sc_is_trace_maximum():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(30, 4))
    result = adaptive_cluster(pts)
    seed = greedy_seed(pts, 5)
    trace = build_merge_trace(pts, seed)
    assert result.silhouette == max(s.silhouette for s in trace.snapshots)


def test_adaptive_cluster_k_within_bound():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 80))
        pts = rng.normal(size=(n, 3))
        result = adaptive_cluster(pts)
        assert 1 <= result.k <= max(1, math.isqrt(n))
        validate_clustering(result, pts)


def test_adaptive_cluster_identical_frames():
    pts = np.tile(np.array([[0.5, 0.5]]), (40, 1))
    result = adaptive_cluster(pts)
    assert result.k == 1


def test_merge_trace_k_decreases_by_one():
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(49, 2))
    trace = build_merge_trace(pts, greedy_seed(pts, 7))
    ks = [s.k for s in trace.snapshots]
    assert ks == [7, 6, 5, 4, 3, 2]
    with pytest.raises(ValueError):
        MergeTrace((trace.snapshots[0], trace.snapshots[2]))


def test_permutation_changes_only_labels():
    rng = np.random.default_rng(10)
    pts = np.vstack(
        [rng.normal(center, 0.08, (9, 2)) for center in [(0, 0), (2, 0), (0, 2)]]
    )
    base = adaptive_cluster(pts)
    base_frames = set(select_candidates(base, pts))
    for seed in range(5):
        perm = np.random.default_rng(seed).permutation(len(pts))
        permuted = pts[perm]
        result = adaptive_cluster(permuted)
        frames = {int(perm[i]) for i in select_candidates(result, permuted)}
        assert frames == base_frames


# -- select_candidates ------------------------------------------------------

def test_select_candidates_singletons():
    pts = np.array([[0.0], [5.0], [9.0]])
    c = Clustering(pts.copy(), np.array([0, 1, 2]), 3, None)
    assert select_candidates(c, pts) == [0, 1, 2]


def test_select_candidates_tie_breaks_low_index():
    pts = np.array([[0.0, 0.0], [2.0, 0.0]])
    c = Clustering(np.array([[1.0, 0.0]]), np.array([0, 0]), 1, None)
    assert select_candidates(c, pts) == [0]


def test_select_candidates_applies_shot_offset():
    pts = np.array([[0.0], [10.0]])
    c = Clustering(pts.copy(), np.array([0, 1]), 2, None)
    assert select_candidates(c, pts, shot_start=100) == [100, 101]


def test_select_candidates_count_equals_k():
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(50, 3))
    c = adaptive_cluster(pts)
    assert len(select_candidates(c, pts)) == c.k
