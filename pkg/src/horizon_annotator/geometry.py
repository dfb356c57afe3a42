"""Horizon line geometry on image coordinates.

Lines are parameterized by position and tilt: ``Y`` is the line's
y-coordinate (pixels) at the frame's central column ``(width - 1) / 2``,
and ``phi`` is the tilt in degrees, zero for a horizontal line and
positive for an anti-clockwise rotation on screen.  The y axis points
down, so a line that rises from left to right has ``phi > 0``.

All computation is in 64-bit floating point and all coordinates refer to
the original (unscaled) frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AnnotatorError

# Minimum horizontal span between the two drawn points, in pixels.  A
# smaller span cannot define a horizon (the horizon is never vertical).
DEGENERATE_DX = 1e-6


class GeometryError(AnnotatorError):
    """Base class for geometry errors."""


class DegenerateLine(GeometryError):
    """The two points are vertically aligned (or nearly so)."""

    code = "degenerate_line"


class OutOfFrame(GeometryError):
    """An input point lies outside the frame rectangle."""

    code = "out_of_frame"


class InvalidTilt(GeometryError):
    """Tilt magnitude is 90 degrees or more."""

    code = "invalid_tilt"


@dataclass(frozen=True)
class Point:
    """A 2D point in pixel coordinates (x rightward, y downward)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point components must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class FrameDims:
    """Frame size in pixels.  A line needs two distinct columns, so both
    dimensions must be at least 2."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError(f"frame dimensions must be at least 2x2, got {self.width}x{self.height}")

    @property
    def central_column(self) -> float:
        """x-coordinate of the frame's central column."""
        return (self.width - 1) / 2

    def contains(self, p: Point) -> bool:
        return 0 <= p.x <= self.width - 1 and 0 <= p.y <= self.height - 1


@dataclass(frozen=True)
class ScaleFactor:
    """Display downscale factor.  Frames are never upscaled, so ``0 < s <= 1``."""

    s: float

    def __post_init__(self) -> None:
        if not (0 < self.s <= 1):
            raise ValueError(f"scale factor must be in (0, 1], got {self.s}")


@dataclass(frozen=True)
class LineAnnotation:
    """A full horizon line for one frame.

    ``(x_s, y_s)`` and ``(x_e, y_e)`` are the endpoints on the frame's
    left and right borders (``x_s = 0``, ``x_e = width - 1``).  The
    endpoint y values are stored unclamped and may fall outside the
    frame for steep lines.  ``Y`` equals the y value at the central
    column, which is also the mean of the endpoint y values.
    """

    Y: float
    phi: float
    x_s: float
    y_s: float
    x_e: float
    y_e: float

    def __post_init__(self) -> None:
        for name in ("Y", "phi", "x_s", "y_s", "x_e", "y_e"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"line parameter {name} must be finite")
        if abs(self.phi) >= 90:
            raise InvalidTilt(f"tilt must satisfy |phi| < 90 degrees, got {self.phi}")

    def endpoints(self) -> tuple[Point, Point]:
        return Point(self.x_s, self.y_s), Point(self.x_e, self.y_e)


def _y_at(a: Point, b: Point, x: float) -> float:
    # Two-point interpolation form.  Exactly invariant under swapping a
    # and b (negating numerator and denominator is exact in IEEE 754) and
    # exact for the frequent integer-coordinate inputs.
    return (a.y * (b.x - x) + b.y * (x - a.x)) / (b.x - a.x)


def infer_full_line(p1: Point, p2: Point, dims: FrameDims) -> LineAnnotation:
    """Extend the line through two drawn points to the frame borders.

    Args:
        p1, p2: Drawn points, inside the frame rectangle, in original
            frame coordinates.
        dims: Frame size the points were drawn on.

    Returns:
        The unique line through ``p1`` and ``p2`` with endpoints at
        ``x = 0`` and ``x = width - 1``.  The result is identical (bit
        for bit) when the two points are swapped.

    Raises:
        OutOfFrame: A point lies outside ``[0, width-1] x [0, height-1]``.
        DegenerateLine: The points are closer than ``DEGENERATE_DX``
            pixels horizontally.
    """
    for p in (p1, p2):
        if not dims.contains(p):
            raise OutOfFrame(
                f"point ({p.x}, {p.y}) outside frame {dims.width}x{dims.height}"
            )
    if abs(p2.x - p1.x) < DEGENERATE_DX:
        raise DegenerateLine(
            f"points span {abs(p2.x - p1.x)} px horizontally; need at least {DEGENERATE_DX}"
        )

    # Canonical order (leftmost first) so results do not depend on the
    # drawing direction.
    a, b = (p1, p2) if p1.x < p2.x else (p2, p1)
    x_e = float(dims.width - 1)
    if a.y == b.y:
        # Horizontal fixpoint: bypass interpolation rounding entirely.
        return LineAnnotation(Y=a.y, phi=0.0, x_s=0.0, y_s=a.y, x_e=x_e, y_e=a.y)

    y_s = _y_at(a, b, 0.0)
    y_e = _y_at(a, b, x_e)
    phi = math.degrees(math.atan2(a.y - b.y, b.x - a.x))
    return LineAnnotation(Y=(y_s + y_e) / 2, phi=phi, x_s=0.0, y_s=y_s, x_e=x_e, y_e=y_e)


def line_from_params(Y: float, phi: float, dims: FrameDims) -> LineAnnotation:
    """Reconstruct the border-to-border line from position and tilt.

    Inverse of the parameterization produced by :func:`infer_full_line`:
    ``y(x) = Y - tan(phi) * (x - central_column)``.

    Raises:
        InvalidTilt: ``|phi| >= 90`` degrees.
    """
    if abs(phi) >= 90:
        raise InvalidTilt(f"tilt must satisfy |phi| < 90 degrees, got {phi}")
    c_x = dims.central_column
    half_drop = math.tan(math.radians(phi)) * c_x
    return LineAnnotation(
        Y=Y,
        phi=phi,
        x_s=0.0,
        y_s=Y + half_drop,
        x_e=float(dims.width - 1),
        y_e=Y - half_drop,
    )


def params_from_endpoints(x_s: float, y_s: float, x_e: float, y_e: float) -> tuple[float, float]:
    """Recover ``(Y, phi)`` from stored line endpoints.

    Endpoints fully determine the line, so this is the authoritative
    reading when stored parameters disagree with them.
    """
    return (y_s + y_e) / 2, math.degrees(math.atan2(y_s - y_e, x_e - x_s))


def compute_scale(frame: FrameDims, max_display: FrameDims) -> ScaleFactor:
    """Largest factor (at most 1) fitting ``frame`` into ``max_display``."""
    return ScaleFactor(
        min(1.0, max_display.width / frame.width, max_display.height / frame.height)
    )


def display_to_original(p: Point, scale: ScaleFactor) -> Point:
    """Map a displayed (downscaled) coordinate back to the original frame.

    Mouse positions on the display always go through this mapping so the
    coordinate readout and all annotations refer to the original frame.
    """
    return Point(p.x / scale.s, p.y / scale.s)


def original_to_display(p: Point, scale: ScaleFactor) -> Point:
    """Map an original-frame coordinate to the downscaled display."""
    return Point(p.x * scale.s, p.y * scale.s)
