"""Frame images and their HSV color histograms.

Frames are binary PPM (P6, maxval 255) so the pipeline stays codec-free;
a manifest file lists one frame path per line in temporal order.

Histograms use 8x8x8 binning over HSV: hue splits [0, 360) into eight 45
degree sectors, saturation and value split [0, 1] into eight bins with
s = 1 and v = 1 clamped into the top bin. The flat bin index is
``h_bin * 64 + s_bin * 8 + v_bin``, giving 512 bins whose counts sum to
the pixel count of the frame.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

HIST_BINS = 512


class FrameFormatError(Exception):
    """Raised for files that are not valid binary PPM frames."""


# --------------------------------------------------------------------------
# PPM I/O
# --------------------------------------------------------------------------

def _parse_ppm_tokens(raw: bytes, count: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated integer tokens after the magic,
    skipping ``#`` comments. Returns the tokens and the offset of the byte
    after the single whitespace that terminates the last token.
    """
    tokens: list[int] = []
    pos = 2  # past the 2-byte magic
    while len(tokens) < count:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FrameFormatError("truncated PPM header")
        try:
            tokens.append(int(raw[start:pos]))
        except ValueError:
            raise FrameFormatError(
                f"bad PPM header token {raw[start:pos]!r}"
            ) from None
    if pos >= len(raw):
        raise FrameFormatError("truncated PPM header")
    return tokens, pos + 1  # skip exactly one whitespace byte


def load_frame(path: str | Path) -> np.ndarray:
    """Load a binary PPM (P6) frame as a (height, width, 3) uint8 RGB array."""
    raw = Path(path).read_bytes()
    if raw[:2] != b"P6":
        raise FrameFormatError(
            f"{path}: unsupported format, magic {raw[:2]!r} (binary P6 required)"
        )
    (width, height, maxval), offset = _parse_ppm_tokens(raw, 3)
    if width < 1 or height < 1:
        raise FrameFormatError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise FrameFormatError(f"{path}: maxval {maxval} unsupported, need 255")
    need = width * height * 3
    payload = raw[offset : offset + need]
    if len(payload) < need:
        raise FrameFormatError(
            f"{path}: pixel data truncated ({len(payload)} of {need} bytes)"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3).copy()


def write_frame(image: np.ndarray, path: str | Path) -> None:
    """Write a (height, width, 3) uint8 RGB array as binary PPM."""
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) RGB array, got shape {arr.shape}")
    height, width = arr.shape[:2]
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def load_manifest(path: str | Path) -> list[Path]:
    """Read a frame manifest: one path per line, relative to the manifest."""
    base = Path(path).parent
    paths = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p = Path(line)
        paths.append(p if p.is_absolute() else base / p)
    return paths


def write_manifest(frame_paths: list[str | Path], path: str | Path) -> None:
    Path(path).write_text("".join(f"{p}\n" for p in frame_paths))


# --------------------------------------------------------------------------
# HSV conversion and histograms
# --------------------------------------------------------------------------

def _hsv_planes(r: np.ndarray, g: np.ndarray, b: np.ndarray):
    """Vectorized hexcone RGB -> HSV on integer channel arrays (0..255).

    Gray pixels (max == min) take h = 0 by convention. Channel ties break
    in r, g, b priority order, matching the scalar sector formula.
    """
    r = r.astype(np.int64)
    g = g.astype(np.int64)
    b = b.astype(np.int64)
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    delta = maxc - minc
    safe = np.where(delta == 0, 1, delta)

    h = np.select(
        [delta == 0, maxc == r, maxc == g],
        [
            np.zeros_like(r, dtype=np.float64),
            (60.0 * (g - b) / safe) % 360.0,
            60.0 * (b - r) / safe + 120.0,
        ],
        default=60.0 * (r - g) / safe + 240.0,
    )
    v = maxc / 255.0
    s = np.where(maxc == 0, 0.0, delta / np.where(maxc == 0, 1, maxc))
    return h, s, v


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Convert one 8-bit RGB pixel to (h in [0, 360), s in [0, 1], v in [0, 1])."""
    h, s, v = _hsv_planes(np.array([r]), np.array([g]), np.array([b]))
    return float(h[0]), float(s[0]), float(v[0])


def compute_histogram(frame: np.ndarray) -> np.ndarray:
    """8x8x8 HSV histogram of an RGB frame; counts sum to width * height."""
    arr = np.asarray(frame, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) RGB array, got shape {arr.shape}")
    pix = arr.reshape(-1, 3)
    h, s, v = _hsv_planes(pix[:, 0], pix[:, 1], pix[:, 2])
    h_bin = (h // 45.0).astype(np.int64)
    s_bin = np.minimum((s * 8.0).astype(np.int64), 7)
    v_bin = np.minimum((v * 8.0).astype(np.int64), 7)
    flat = h_bin * 64 + s_bin * 8 + v_bin
    return np.bincount(flat, minlength=HIST_BINS).astype(np.int64)


def fallback_features(frames: list[np.ndarray]) -> np.ndarray:
    """Per-frame L1-normalized histograms as a feature matrix (d = 512).

    A codec-free stand-in for learned frame embeddings: weaker semantics,
    but the whole pipeline runs on it with no model dependency.
    """
    if not frames:
        raise ValueError("need at least one frame")
    rows = np.empty((len(frames), HIST_BINS), dtype=np.float64)
    for i, frame in enumerate(frames):
        hist = compute_histogram(frame)
        rows[i] = hist / hist.sum()
    return rows.astype(np.float32)


def histograms_for_frames(frame_paths: list[Path]) -> np.ndarray:
    """Load every frame in a manifest and stack their histograms, (n, 512)."""
    if not frame_paths:
        raise ValueError("empty frame manifest")
    return np.stack([compute_histogram(load_frame(p)) for p in frame_paths])
