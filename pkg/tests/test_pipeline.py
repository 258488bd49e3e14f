import math

import numpy as np
import pytest

from lmske.frames import compute_histogram, fallback_features
from lmske.interchange import ShotList
from lmske.pipeline import (
    PipelineConfig,
    normalize_rows,
    run_shot,
    run_video,
    summarize_video,
)


def make_shot_frames(rng, base_rgb, count, width=32, height=24, noise=12):
    """Frames of one synthetic shot: dominant color + a fixed color strip."""
    strip = np.zeros((4, width, 3), dtype=np.uint8)
    palette = [(255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 0),
               (0, 255, 255), (255, 0, 255), (255, 255, 255), (128, 64, 0),
               (64, 0, 128), (0, 128, 64), (200, 200, 200), (30, 90, 150)]
    band = max(1, width // len(palette))
    for col in range(width):
        strip[:, col] = palette[min(col // band, len(palette) - 1)]
    frames = []
    for _ in range(count):
        img = np.clip(
            np.array(base_rgb, dtype=np.int64)
            + rng.integers(-noise, noise + 1, size=(height, width, 3)),
            0, 255,
        ).astype(np.uint8)
        img[-4:] = strip
        frames.append(img)
    return frames


# -- config validation ------------------------------------------------------

def test_config_defaults():
    cfg = PipelineConfig()
    assert cfg.redundancy_threshold == 0.8
    assert cfg.min_nonzero_bins == 10
    assert cfg.l2_normalize_features


@pytest.mark.parametrize("kwargs", [
    {"redundancy_threshold": 0.0},
    {"redundancy_threshold": 1.5},
    {"min_nonzero_bins": 0},
    {"sc_tie_rule": "prefer smaller k"},
])
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(**kwargs)


def test_normalize_rows_unit_length():
    rng = np.random.default_rng(0)
    rows = normalize_rows(rng.normal(size=(5, 8)))
    assert np.allclose(np.linalg.norm(rows, axis=1), 1.0)
    zero = normalize_rows(np.zeros((1, 4)))
    assert np.array_equal(zero, np.zeros((1, 4)))


# -- run_shot ---------------------------------------------------------------

def test_run_shot_single_informative_frame():
    rng = np.random.default_rng(1)
    frames = make_shot_frames(rng, (200, 60, 40), 1)
    feats = fallback_features(frames)
    hists = np.stack([compute_histogram(f) for f in frames])
    assert run_shot(feats, hists, shot_start=7) == [7]


def test_run_shot_identical_frames_collapse_to_one():
    rng = np.random.default_rng(2)
    frame = make_shot_frames(rng, (200, 60, 40), 1)[0]
    frames = [frame.copy() for _ in range(40)]
    feats = fallback_features(frames)
    hists = np.stack([compute_histogram(f) for f in frames])
    assert run_shot(feats, hists, shot_start=0) == [0]


def test_run_shot_solid_color_frames_give_empty():
    frames = [np.full((24, 32, 3), (255, 0, 0), dtype=np.uint8)] * 5
    feats = fallback_features(frames)
    hists = np.stack([compute_histogram(f) for f in frames])
    assert run_shot(feats, hists, shot_start=0) == []


def test_run_shot_rejects_misaligned_inputs():
    with pytest.raises(ValueError):
        run_shot(np.ones((3, 4)), np.ones((2, 512)), 0)
    with pytest.raises(ValueError):
        run_shot(np.empty((0, 4)), np.empty((0, 512)), 0)


# -- run_video --------------------------------------------------------------

def three_shot_fixture(frames_per_shot=20, seed=5):
    rng = np.random.default_rng(seed)
    frames = []
    for base in [(200, 60, 40), (40, 200, 60), (60, 40, 200)]:
        frames.extend(make_shot_frames(rng, base, frames_per_shot))
    shots = ShotList(
        tuple(
            (i * frames_per_shot, (i + 1) * frames_per_shot - 1)
            for i in range(3)
        )
    )
    feats = fallback_features(frames)
    hists = np.stack([compute_histogram(f) for f in frames])
    return frames, shots, feats, hists


def test_run_video_three_color_shots_one_keyframe_each():
    _, shots, feats, hists = three_shot_fixture()
    result = run_video(feats, shots, hists)
    assert len(result.indices) == 3
    assert result.per_shot is not None
    for (start, end), group in zip(shots, result.per_shot):
        assert len(group) == 1
        assert start <= group[0] <= end


def test_run_video_indices_strictly_increase_within_shots():
    _, shots, feats, hists = three_shot_fixture()
    result = run_video(feats, shots, hists)
    assert list(result.indices) == sorted(result.indices)
    for (start, end), group in zip(shots, result.per_shot):
        for idx in group:
            assert start <= idx <= end


def test_run_video_shots_independent():
    frames, shots, feats, hists = three_shot_fixture()
    base = run_video(feats, shots, hists)
    # wreck shot 0 (make it solid-color/uninformative); shots 1 and 2 keep
    # their exact results
    solid = np.full_like(frames[0], 255)
    solid_hist = compute_histogram(solid)
    feats2 = feats.copy()
    hists2 = hists.copy()
    feats2[:20] = fallback_features([solid])[0]
    hists2[:20] = solid_hist
    changed = run_video(feats2, shots, hists2)
    assert changed.per_shot[0] == ()
    assert changed.per_shot[1] == base.per_shot[1]
    assert changed.per_shot[2] == base.per_shot[2]


def test_run_video_compression_bound():
    _, shots, feats, hists = three_shot_fixture()
    result = run_video(feats, shots, hists)
    bound = sum(math.isqrt(end - start + 1) for start, end in shots)
    assert len(result.indices) <= bound


def test_run_video_rejects_shape_mismatch():
    _, shots, feats, hists = three_shot_fixture()
    with pytest.raises(ValueError):
        run_video(feats[:-1], shots, hists[:-1])
    with pytest.raises(ValueError):
        run_video(feats, shots, hists[:-1])


def test_summarize_video_reports_match_keyframes():
    _, shots, feats, hists = three_shot_fixture()
    summary = summarize_video(feats, shots, hists)
    assert len(summary.shot_reports) == 3
    for report, (start, end) in zip(summary.shot_reports, shots):
        assert (report.start, report.end) == (start, end)
        assert 1 <= report.k <= math.isqrt(end - start + 1)
        assert report.keyframes == summary.keyframes.per_shot[shots.shots.index((start, end))]
        assert set(report.keyframes) <= set(report.candidates)


def test_summarize_video_parallel_matches_serial():
    _, shots, feats, hists = three_shot_fixture()
    serial = summarize_video(feats, shots, hists, jobs=1)
    parallel = summarize_video(feats, shots, hists, jobs=4)
    assert serial.keyframes.indices == parallel.keyframes.indices
    assert serial.keyframes.per_shot == parallel.keyframes.per_shot
