"""Horizon line ground-truth annotation suite for maritime video."""

from .errors import AnnotatorError
from .geometry import (
    FrameDims,
    LineAnnotation,
    Point,
    ScaleFactor,
    compute_scale,
    display_to_original,
    infer_full_line,
    line_from_params,
    original_to_display,
)
from .gt_format import GtArray, GtDiffReport, gt_diff, gt_to_text, read_gt, read_gt_file, write_gt, write_gt_file
from .frame_source import FrameSource, ImageDirectorySource, SourceInfo, VideoSource, open_source, probe
from .session import IncompleteWarning, Saved, Session

__version__ = "0.1.0"

__all__ = [
    "AnnotatorError",
    "FrameDims",
    "FrameSource",
    "GtArray",
    "GtDiffReport",
    "ImageDirectorySource",
    "IncompleteWarning",
    "LineAnnotation",
    "Point",
    "Saved",
    "ScaleFactor",
    "Session",
    "SourceInfo",
    "VideoSource",
    "compute_scale",
    "display_to_original",
    "gt_diff",
    "gt_to_text",
    "infer_full_line",
    "line_from_params",
    "open_source",
    "original_to_display",
    "probe",
    "read_gt",
    "read_gt_file",
    "write_gt",
    "write_gt_file",
]
