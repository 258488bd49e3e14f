"""Deterministic synthetic test videos: colored shots with seeded noise.

Each shot gets a dominant color (hues cycle through a red/green/blue/...
palette) with mild per-pixel noise, plus a fixed 16-color strip along the
bottom of every frame. The strip guarantees each frame populates well over
10 histogram bins, so no frame is mistaken for a solid-color one, while
frames of different shots still share too little color mass to be confused
with each other.

The generator emits a complete interchange bundle: PPM frames, a manifest,
the shot file, fallback features, and a benchmark keyframe set holding the
first frame of every shot. Identical seeds produce byte-identical output.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .frames import fallback_features, write_frame, write_manifest
from .interchange import KeyframeSet, ShotList, write_features, write_keyframes, write_shots

# Dominant hues per shot, cycled; kept off the 45-degree bin boundaries so
# noisy pixels stay inside one hue bin. The noise amplitude is large enough
# that saturation straddles a bin boundary: histograms of a shot vary from
# frame to frame (similarity ~0.98) instead of collapsing to identical bins.
_SHOT_HUES = (10.0, 120.0, 240.0, 60.0, 190.0, 300.0)
_NOISE_AMPLITUDE = 12

FRAMES_SUBDIR = "frames"
MANIFEST_NAME = "manifest.txt"
SHOTS_NAME = "shots.json"
FEATURES_NAME = "features.lmkf"
BENCHMARK_NAME = "benchmark.keyframes.json"


def _hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    c = v * s
    x = c * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    m = v - c
    sector = int(h // 60) % 6
    rp, gp, bp = [
        (c, x, 0.0), (x, c, 0.0), (0.0, c, x),
        (0.0, x, c), (x, 0.0, c), (c, 0.0, x),
    ][sector]
    return tuple(int(round((u + m) * 255)) for u in (rp, gp, bp))


def _color_strip(width: int, rows: int) -> np.ndarray:
    """Fixed strip of 16 colors hitting 16 distinct histogram bins."""
    colors = [
        _hsv_to_rgb(22.5 + 45.0 * k, s, 0.95)
        for k in range(8)
        for s in (0.45, 0.90)
    ]
    strip = np.zeros((rows, width, 3), dtype=np.uint8)
    band = max(1, width // len(colors))
    for col in range(width):
        strip[:, col] = colors[min(col // band, len(colors) - 1)]
    return strip


def generate(
    out_dir: str | Path,
    num_shots: int,
    frames_per_shot: int,
    seed: int,
    width: int = 64,
    height: int = 48,
) -> dict:
    """Write a synthetic video bundle; returns a summary of what was written."""
    if num_shots < 1 or frames_per_shot < 1:
        raise ValueError("num_shots and frames_per_shot must be >= 1")
    out = Path(out_dir)
    (out / FRAMES_SUBDIR).mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    strip_rows = max(1, height // 6)
    strip = _color_strip(width, strip_rows)

    frames: list[np.ndarray] = []
    rel_paths: list[str] = []
    total = num_shots * frames_per_shot
    for shot in range(num_shots):
        hue = _SHOT_HUES[shot % len(_SHOT_HUES)]
        base = np.array(_hsv_to_rgb(hue, 0.8, 0.8), dtype=np.int64)
        for _ in range(frames_per_shot):
            noise = rng.integers(
                -_NOISE_AMPLITUDE, _NOISE_AMPLITUDE + 1, size=(height, width, 3)
            )
            img = np.clip(base[None, None, :] + noise, 0, 255).astype(np.uint8)
            img[-strip_rows:] = strip
            frame_idx = len(frames)
            rel = f"{FRAMES_SUBDIR}/frame_{frame_idx:06d}.ppm"
            write_frame(img, out / rel)
            frames.append(img)
            rel_paths.append(rel)

    write_manifest(rel_paths, out / MANIFEST_NAME)

    shots = ShotList(
        tuple(
            (i * frames_per_shot, (i + 1) * frames_per_shot - 1)
            for i in range(num_shots)
        )
    )
    write_shots(shots, out / SHOTS_NAME)

    write_features(fallback_features(frames), out / FEATURES_NAME)

    benchmark = KeyframeSet(tuple(i * frames_per_shot for i in range(num_shots)))
    write_keyframes(benchmark, out / BENCHMARK_NAME)

    return {
        "out_dir": str(out),
        "total_frames": total,
        "num_shots": num_shots,
        "frames_per_shot": frames_per_shot,
        "seed": seed,
        "manifest": str(out / MANIFEST_NAME),
        "shots": str(out / SHOTS_NAME),
        "features": str(out / FEATURES_NAME),
        "benchmark": str(out / BENCHMARK_NAME),
    }
