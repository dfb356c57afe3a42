"""Annotation session state machine.

A session owns one frame source and one annotation track (one slot per
frame, Annotated or Missing).  It tracks the cursor, the pending line
(drawn but not yet validated), browsing offset, display thickness and
per-frame hide flags.  Hide flags and thickness are visualization state
only and never reach the GT file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import AnnotatorError
from .frame_source import FrameSource, IndexOutOfRange
from .geometry import FrameDims, LineAnnotation, Point, infer_full_line, params_from_endpoints
from .gt_format import GtArray, IoFailure, LengthMismatch, write_gt_file

GT_SUFFIX = "_LineGT.npy"

# Stored (Y, phi) may drift from the endpoints by float noise in foreign
# files; beyond this they are treated as inconsistent and recomputed.
CONSISTENCY_TOL = 1e-3


class SessionError(AnnotatorError):
    """Base class for session errors."""


class NoPendingLine(SessionError):
    code = "no_pending_line"


class CurrentNotAnnotated(SessionError):
    code = "current_not_annotated"


class InvalidOffset(SessionError):
    code = "invalid_offset"


class InvalidThickness(SessionError):
    code = "invalid_thickness"


@dataclass
class Slot:
    """One frame's annotation state.  ``hidden`` is visualization only
    and may be set only while the slot is annotated."""

    annotation: LineAnnotation | None = None
    hidden: bool = False


@dataclass(frozen=True)
class ConsistencyWarning:
    """Loaded row whose stored (Y, phi) disagreed with its endpoints.

    Endpoints are authoritative; the slot received the recomputed values.
    """

    frame: int
    stored_y: float
    stored_phi: float
    corrected_y: float
    corrected_phi: float


@dataclass(frozen=True)
class Saved:
    path: Path
    byte_count: int


@dataclass(frozen=True)
class IncompleteWarning:
    """Save refused: ``missing_count`` frames are unannotated.  Re-invoke
    save with ``force=True`` to write NaN rows for them."""

    missing_count: int


SaveOutcome = Saved | IncompleteWarning


class AnnotationTrack:
    """Fixed-length sequence of per-frame slots."""

    def __init__(self, length: int):
        self._slots = [Slot() for _ in range(length)]

    def __len__(self) -> int:
        return len(self._slots)

    def slot(self, index: int) -> Slot:
        return self._slots[index]

    @property
    def annotated_count(self) -> int:
        return sum(1 for s in self._slots if s.annotation is not None)

    @property
    def missing_count(self) -> int:
        return len(self._slots) - self.annotated_count

    def snapshot(self) -> tuple:
        """Annotation values only (no hide flags), for change detection."""
        return tuple(
            None
            if s.annotation is None
            else (s.annotation.Y, s.annotation.phi, s.annotation.x_s,
                  s.annotation.y_s, s.annotation.x_e, s.annotation.y_e)
            for s in self._slots
        )

    def to_gt_array(self) -> GtArray:
        return GtArray.from_rows(
            None
            if s.annotation is None
            else (s.annotation.Y, s.annotation.phi, s.annotation.x_s,
                  s.annotation.x_e, s.annotation.y_s, s.annotation.y_e)
            for s in self._slots
        )


def _track_from_gt(array: GtArray) -> tuple[AnnotationTrack, list[ConsistencyWarning]]:
    track = AnnotationTrack(array.frame_count)
    warnings: list[ConsistencyWarning] = []
    for i in range(array.frame_count):
        row = array.row(i)
        if row is None:
            continue
        y, phi, x_s, x_e, y_s, y_e = row
        expected_y, expected_phi = params_from_endpoints(x_s, y_s, x_e, y_e)
        if abs(y - expected_y) > CONSISTENCY_TOL or abs(phi - expected_phi) > CONSISTENCY_TOL:
            warnings.append(ConsistencyWarning(i, y, phi, expected_y, expected_phi))
            y, phi = expected_y, expected_phi
        track.slot(i).annotation = LineAnnotation(Y=y, phi=phi, x_s=x_s, y_s=y_s, x_e=x_e, y_e=y_e)
    return track, warnings


def gt_filename(stem: str) -> str:
    return f"{stem}{GT_SUFFIX}"


def locate_gt(stem: str, directory) -> Path | None:
    """Find a GT file for a video stem, tolerating the suffix being
    attached with or without the underscore separator."""
    directory = Path(directory)
    for name in (f"{stem}{GT_SUFFIX}", f"{stem}LineGT.npy"):
        candidate = directory / name
        if candidate.is_file():
            return candidate
    return None


def _parse_positive_int(raw) -> int:
    if isinstance(raw, bool):
        raise ValueError(f"not an integer: {raw!r}")
    if isinstance(raw, int):
        value = raw
    elif isinstance(raw, str):
        value = int(raw.strip())  # rejects text and fractional input
    else:
        raise ValueError(f"not an integer: {raw!r}")
    if value <= 0:
        raise ValueError(f"must be positive: {value}")
    return value


class Session:
    """Live annotation state for one video.

    Mutating calls must be serialized by the caller (one logical writer
    per session); read-only queries between mutations are safe.
    """

    def __init__(self, source: FrameSource):
        self.source = source
        self.track = AnnotationTrack(source.info.frame_count)
        self.cursor = 0
        self.pending: tuple[Point, Point] | None = None
        self.browse_offset = 1
        self.thickness = 2
        self._baseline = self.track.snapshot()

    # -- queries ------------------------------------------------------

    @property
    def frame_count(self) -> int:
        return self.source.info.frame_count

    @property
    def dims(self) -> FrameDims:
        return self.source.info.dims

    @property
    def current_slot(self) -> Slot:
        return self.track.slot(self.cursor)

    @property
    def dirty(self) -> bool:
        """True iff the track differs from its last saved/loaded state."""
        return self.track.snapshot() != self._baseline

    def current_annotation_text(self) -> str:
        """Position/tilt readout for the current frame, or ``???``."""
        annotation = self.current_slot.annotation
        if annotation is None:
            return "???"
        return f"Y={annotation.Y:.2f} px, phi={annotation.phi:.2f} deg"

    def to_gt_array(self) -> GtArray:
        return self.track.to_gt_array()

    # -- pending line lifecycle ----------------------------------------

    def set_pending(self, p1: Point, p2: Point) -> LineAnnotation:
        """Stage a drawn line and return the inferred full-width preview.

        The slot is untouched until :meth:`validate_line`.  On geometry
        errors any previous pending line is kept.
        """
        preview = infer_full_line(p1, p2, self.dims)
        self.pending = (p1, p2)
        return preview

    def abort_pending(self) -> None:
        """Drop the pending line (right-click abort); no-op without one."""
        self.pending = None

    def validate_line(self) -> LineAnnotation:
        """Commit the pending line to the current frame's slot."""
        if self.pending is None:
            raise NoPendingLine("no drawn line to validate")
        annotation = infer_full_line(*self.pending, self.dims)
        slot = self.current_slot
        slot.annotation = annotation
        slot.hidden = False
        self.pending = None
        return annotation

    # -- slot mutations -------------------------------------------------

    def delete_annotation(self) -> bool:
        """Clear the current frame's annotation; returns whether one existed."""
        slot = self.current_slot
        existed = slot.annotation is not None
        slot.annotation = None
        slot.hidden = False
        return existed

    def set_hidden(self, hidden: bool) -> bool:
        """Toggle overlay visibility for the current frame (annotated slots
        only); persisted GT is unaffected.  Returns whether it applied."""
        slot = self.current_slot
        if slot.annotation is None:
            return False
        slot.hidden = hidden
        return True

    def replicate_backwards(self) -> int:
        """Copy the current annotation onto every earlier Missing frame.

        Earlier annotated frames are untouched.  Returns the number of
        frames filled.
        """
        annotation = self.current_slot.annotation
        if annotation is None:
            raise CurrentNotAnnotated("current frame has no annotation to replicate")
        filled = 0
        for i in range(self.cursor):
            slot = self.track.slot(i)
            if slot.annotation is None:
                slot.annotation = annotation
                filled += 1
        return filled

    # -- navigation and settings ----------------------------------------

    def browse(self, direction: str) -> bool:
        """Move the cursor by the browsing offset; clamps at both ends.

        Returns whether clamping occurred.  Any pending line is dropped:
        a preview on a frame no longer shown must not be committable.
        """
        if direction not in ("next", "previous"):
            raise ValueError(f"direction must be 'next' or 'previous', got {direction!r}")
        step = self.browse_offset if direction == "next" else -self.browse_offset
        target = self.cursor + step
        clamped = not 0 <= target <= self.frame_count - 1
        self.cursor = min(max(target, 0), self.frame_count - 1)
        self.pending = None
        return clamped

    def seek(self, index: int) -> None:
        """Jump to an exact frame index."""
        if not 0 <= index < self.frame_count:
            raise IndexOutOfRange(
                f"frame index {index} out of range [0, {self.frame_count - 1}]"
            )
        self.cursor = index
        self.pending = None

    def set_browse_offset(self, raw) -> int:
        """Parse and store the browsing offset; keeps the old value on
        invalid input."""
        try:
            self.browse_offset = _parse_positive_int(raw)
        except ValueError:
            raise InvalidOffset(
                f"invalid browsing offset {raw!r}: must be a positive integer"
            ) from None
        return self.browse_offset

    def set_thickness(self, raw) -> int:
        """Parse and store the overlay thickness (visualization only)."""
        try:
            self.thickness = _parse_positive_int(raw)
        except ValueError:
            raise InvalidThickness(
                f"invalid line thickness {raw!r}: must be a positive integer"
            ) from None
        return self.thickness

    # -- persistence -----------------------------------------------------

    def load_gt(self, array: GtArray) -> list[ConsistencyWarning]:
        """Replace the track with the contents of a GT array.

        Raises:
            LengthMismatch: Array length differs from the frame count.
        """
        if array.frame_count != self.frame_count:
            raise LengthMismatch(
                f"GT has {array.frame_count} rows but video has {self.frame_count} frames"
            )
        self.track, warnings = _track_from_gt(array)
        self.pending = None
        self._baseline = self.track.snapshot()
        return warnings

    def save(self, directory, force: bool = False) -> SaveOutcome:
        """Write the track as ``<video stem>_LineGT.npy`` into ``directory``.

        Without ``force``, saving an incomplete track returns
        :class:`IncompleteWarning` and writes nothing.
        """
        missing = self.track.missing_count
        if missing > 0 and not force:
            return IncompleteWarning(missing)
        directory = Path(directory)
        if not directory.is_dir():
            raise IoFailure(f"not a writable directory: {directory}")
        path = directory / gt_filename(self.source.info.stem)
        byte_count = write_gt_file(self.to_gt_array(), path)
        self._baseline = self.track.snapshot()
        return Saved(path=path, byte_count=byte_count)
