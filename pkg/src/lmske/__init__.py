"""Sequential keyframe extraction for video summarization.

Per shot: adaptive clustering over frame features picks candidate
keyframes, redundancy elimination prunes them, and the per-shot results
are concatenated in temporal order. Evaluation metrics (F1 against a
benchmark set, fidelity, compression ratio) and the on-disk interchange
formats round out the toolkit.
"""

from .clustering import (
    Clustering,
    MergeTrace,
    adaptive_cluster,
    compute_sse,
    greedy_seed,
    merge_closest,
    select_candidates,
    silhouette,
)
from .frames import (
    compute_histogram,
    fallback_features,
    load_frame,
    load_manifest,
    rgb_to_hsv,
    write_frame,
    write_manifest,
)
from .interchange import (
    InterchangeError,
    KeyframeSet,
    ShotList,
    load_features,
    load_keyframes,
    load_shots,
    write_features,
    write_keyframes,
    write_shots,
)
from .metrics import (
    EvalReport,
    compression_ratio,
    evaluate_dataset,
    evaluate_video,
    f1,
    fidelity,
    match_keyframes,
)
from .pipeline import (
    PipelineConfig,
    VideoSummary,
    run_shot,
    run_video,
    summarize_video,
)
from .redundancy import eliminate, histogram_similarity, is_uninformative

__version__ = "0.1.0"

__all__ = [
    "Clustering",
    "EvalReport",
    "InterchangeError",
    "KeyframeSet",
    "MergeTrace",
    "PipelineConfig",
    "ShotList",
    "VideoSummary",
    "adaptive_cluster",
    "compression_ratio",
    "compute_histogram",
    "compute_sse",
    "eliminate",
    "evaluate_dataset",
    "evaluate_video",
    "f1",
    "fallback_features",
    "fidelity",
    "greedy_seed",
    "histogram_similarity",
    "is_uninformative",
    "load_features",
    "load_frame",
    "load_keyframes",
    "load_manifest",
    "load_shots",
    "match_keyframes",
    "merge_closest",
    "rgb_to_hsv",
    "run_shot",
    "run_video",
    "select_candidates",
    "silhouette",
    "summarize_video",
    "write_features",
    "write_frame",
    "write_keyframes",
    "write_manifest",
    "write_shots",
]
