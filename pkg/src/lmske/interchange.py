"""On-disk interchange formats: frame features, shot boundaries, keyframe sets.

These files are the contract between the numerical pipeline and whatever
produced the per-frame data (a model extractor, the synthetic generator,
or a hand-written test fixture).

Formats
-------
Feature file (binary, little-endian):
    magic  ``LMKF``         4 bytes
    version (u8, = 1)       1 byte
    n frames (u32 le)       4 bytes
    d dims   (u32 le)       4 bytes
    payload                 n*d float32 le, row-major, one row per frame

Shot file (JSON): ``{"shots": [{"start": 0, "end": 99}, ...]}``
with inclusive 0-based intervals that tile the video exactly.

Keyframe file (JSON): ``{"indices": [...]}`` plus optional ``"per_shot"``,
a list of per-shot index lists whose concatenation equals ``indices``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURE_MAGIC = b"LMKF"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sBII")  # magic, version, n, d


class InterchangeError(Exception):
    """Base class for malformed interchange files."""


class BadMagicError(InterchangeError):
    pass


class VersionError(InterchangeError):
    pass


class HeaderError(InterchangeError):
    """Header fields violate the format contract (n or d = 0, short header)."""


class TruncatedFileError(InterchangeError):
    pass


class TrailingDataError(InterchangeError):
    pass


class NonFiniteValueError(InterchangeError):
    pass


class ShotListError(InterchangeError):
    pass


class KeyframeSetError(InterchangeError):
    pass


# --------------------------------------------------------------------------
# feature matrices
# --------------------------------------------------------------------------

def validate_features(matrix: np.ndarray) -> np.ndarray:
    """Check a feature matrix: 2-D, n >= 1, d >= 1, all values finite.

    Returns the array as float32 (the on-disk precision).
    """
    arr = np.asarray(matrix, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {arr.shape}")
    n, d = arr.shape
    if n < 1 or d < 1:
        raise ValueError(f"feature matrix must be at least 1x1, got {n}x{d}")
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"non-finite feature value at flat index {bad}")
    return arr


def write_features(matrix: np.ndarray, path: str | Path) -> None:
    """Write a feature matrix in the binary ``LMKF`` format."""
    arr = validate_features(matrix)
    n, d = arr.shape
    header = _HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, n, d)
    payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    try:
        Path(path).write_bytes(header + payload)
    except OSError as exc:
        raise OSError(f"cannot write feature file {path}: {exc}") from exc


def load_features(path: str | Path) -> np.ndarray:
    """Load a feature matrix, validating every format invariant.

    Raises a distinct :class:`InterchangeError` subclass per defect
    (bad magic, wrong version, zero dimensions, truncated or oversized
    payload, non-finite values), naming the byte offset where it applies.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read feature file {path}: {exc}") from exc

    if len(raw) < _HEADER.size:
        raise HeaderError(
            f"{path}: header needs {_HEADER.size} bytes, file has {len(raw)}"
        )
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r} at offset 0")
    if version != FEATURE_VERSION:
        raise VersionError(
            f"{path}: unsupported version {version} at offset 4"
        )
    if n < 1 or d < 1:
        raise HeaderError(f"{path}: header declares {n}x{d} matrix at offset 5")

    expected = n * d * 4
    actual = len(raw) - _HEADER.size
    if actual < expected:
        raise TruncatedFileError(
            f"{path}: payload truncated at offset {len(raw)}, "
            f"expected {expected} bytes, got {actual}"
        )
    if actual > expected:
        raise TrailingDataError(
            f"{path}: {actual - expected} trailing bytes after offset "
            f"{_HEADER.size + expected}"
        )

    arr = np.frombuffer(raw, dtype="<f4", count=n * d, offset=_HEADER.size)
    arr = arr.reshape(n, d).copy()
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteValueError(
            f"{path}: non-finite value at byte offset {_HEADER.size + 4 * bad}"
        )
    return arr


# --------------------------------------------------------------------------
# shot lists
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShotList:
    """Ordered, inclusive frame intervals that tile a video exactly.

    Consecutive shots must satisfy ``next.start == prev.end + 1`` with the
    first shot starting at frame 0, so no frame is silently dropped.
    """

    shots: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.shots:
            raise ShotListError("shot list is empty")
        prev_end = -1
        for i, (start, end) in enumerate(self.shots):
            if start < 0 or end < 0:
                raise ShotListError(f"shot {i}: negative index ({start}, {end})")
            if start > end:
                raise ShotListError(f"shot {i}: start {start} > end {end}")
            if start != prev_end + 1:
                if start > prev_end + 1:
                    raise ShotListError(
                        f"shot {i}: gap, frames {prev_end + 1}..{start - 1} uncovered"
                    )
                raise ShotListError(
                    f"shot {i}: overlaps or unsorted, start {start} <= "
                    f"previous end {prev_end}"
                )
            prev_end = end

    def __len__(self) -> int:
        return len(self.shots)

    def __iter__(self):
        return iter(self.shots)

    @property
    def total_frames(self) -> int:
        return self.shots[-1][1] + 1


def write_shots(shots: ShotList, path: str | Path) -> None:
    doc = {"shots": [{"start": s, "end": e} for s, e in shots]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_shots(path: str | Path) -> ShotList:
    """Load and validate a shot file; any tiling violation raises."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read shot file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ShotListError(f"{path}: not valid JSON: {exc}") from exc
    try:
        records = doc["shots"]
        pairs = tuple((int(r["start"]), int(r["end"])) for r in records)
    except (TypeError, KeyError, ValueError) as exc:
        raise ShotListError(f"{path}: malformed shot records: {exc}") from exc
    try:
        return ShotList(pairs)
    except ShotListError as exc:
        raise ShotListError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# keyframe sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyframeSet:
    """Strictly increasing global frame indices, optionally grouped by shot."""

    indices: tuple[int, ...]
    per_shot: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        prev = -1
        for idx in self.indices:
            if idx < 0:
                raise KeyframeSetError(f"negative frame index {idx}")
            if idx == prev:
                raise KeyframeSetError(f"duplicate frame index {idx}")
            if idx < prev:
                raise KeyframeSetError(
                    f"indices not strictly increasing at {idx} (after {prev})"
                )
            prev = idx
        if self.per_shot is not None:
            flat = tuple(i for group in self.per_shot for i in group)
            if flat != self.indices:
                raise KeyframeSetError(
                    "per_shot groups do not concatenate to indices"
                )

    def __len__(self) -> int:
        return len(self.indices)


def write_keyframes(keyframes: KeyframeSet, path: str | Path) -> None:
    doc: dict = {"indices": list(keyframes.indices)}
    if keyframes.per_shot is not None:
        doc["per_shot"] = [list(group) for group in keyframes.per_shot]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_keyframes(path: str | Path) -> KeyframeSet:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read keyframe file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise KeyframeSetError(f"{path}: not valid JSON: {exc}") from exc
    try:
        indices = tuple(int(i) for i in doc["indices"])
        per_shot = None
        if doc.get("per_shot") is not None:
            per_shot = tuple(tuple(int(i) for i in g) for g in doc["per_shot"])
    except (TypeError, KeyError, ValueError) as exc:
        raise KeyframeSetError(f"{path}: malformed keyframe document: {exc}") from exc
    try:
        return KeyframeSet(indices, per_shot)
    except KeyframeSetError as exc:
        raise KeyframeSetError(f"{path}: {exc}") from exc
