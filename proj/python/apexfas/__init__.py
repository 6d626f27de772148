"""Gaussian apex frames, pseudo-label training and threshold-transfer metrics."""

from apexfas._core import (
    DataError,
    NumericError,
    UsageError,
    apex_frame,
    auc,
    central_index,
    eer_threshold,
    evaluate_transfer,
    expected_segment_count,
    gaussian_weights,
    generate_dataset,
    hter,
    read_video,
    roc_curve,
    run_cli,
    segment_apexes,
    write_video,
)

__all__ = [
    "DataError",
    "NumericError",
    "UsageError",
    "apex_frame",
    "auc",
    "central_index",
    "eer_threshold",
    "evaluate_transfer",
    "expected_segment_count",
    "gaussian_weights",
    "generate_dataset",
    "hter",
    "read_video",
    "roc_curve",
    "run_cli",
    "segment_apexes",
    "write_video",
]
