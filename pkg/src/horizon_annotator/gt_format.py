"""Bit-exact reader/writer for the ground-truth annotation file.

A GT file is an N x 6 little-endian float64 matrix in the array-file
format v1.0, one row per video frame, columns in the order
``Y, phi, x_s, x_e, y_s, y_e``.  Unannotated frames are rows of six
NaNs.  The on-disk layout written here is fixed:

* 6-byte magic ``\\x93NUMPY``, version bytes ``\\x01\\x00``;
* 2-byte little-endian header length;
* ASCII header ``{'descr': '<f8', 'fortran_order': False, 'shape':
  (N, 6), }`` space-padded so the whole preamble is a multiple of 64
  bytes, terminated by a newline;
* N x 6 float64 values, little-endian, row-major.  NaN is always
  written as the quiet-NaN pattern ``0x7FF8000000000000``.

The reader accepts any header padding width but is otherwise strict:
foreign dtypes, Fortran order, wrong shapes and rows mixing NaN with
finite values are hard errors, never silently repaired.

The codec is implemented at byte level on purpose; ``numpy.save`` /
``numpy.load`` serve as an independent cross-check in the test suite
and must never replace this module.
"""

from __future__ import annotations

import ast
import json
import math
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import AnnotatorError

MAGIC = b"\x93NUMPY"
COLUMNS = ("Y", "phi", "x_s", "x_e", "y_s", "y_e")

_PREAMBLE_ALIGN = 64
_QUIET_NAN = struct.pack("<Q", 0x7FF8000000000000)
_ROW_BYTES = 6 * 8


class GtFormatError(AnnotatorError):
    """Base class for GT file format errors."""


class BadMagic(GtFormatError):
    code = "bad_magic"


class UnsupportedVersion(GtFormatError):
    code = "unsupported_version"


class BadHeader(GtFormatError):
    code = "bad_header"


class BadShape(GtFormatError):
    code = "bad_shape"


class MixedRow(GtFormatError):
    """A row mixes NaN and finite values; the file is corrupt or foreign."""

    code = "mixed_row"


class TruncatedData(GtFormatError):
    code = "truncated_data"


class InvalidRow(GtFormatError):
    """A row offered for writing mixes NaN and finite values."""

    code = "invalid_row"


class LengthMismatch(GtFormatError):
    code = "length_mismatch"


class IoFailure(GtFormatError):
    code = "io_failure"


@dataclass(frozen=True)
class GtArray:
    """In-memory image of a GT file: an (N, 6) float64 matrix.

    Row i is frame i.  A row is Missing when all six values are NaN and
    Annotated when all six are finite; anything else is rejected at
    serialization boundaries.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values, dtype="<f8")
        if arr.ndim != 2 or arr.shape[1] != 6:
            raise BadShape(f"GT array must have shape (N, 6), got {arr.shape}")
        object.__setattr__(self, "values", arr)

    @classmethod
    def empty(cls, frame_count: int) -> "GtArray":
        """All-Missing array for a video of ``frame_count`` frames."""
        return cls(np.full((frame_count, 6), np.nan))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float] | None]) -> "GtArray":
        """Build from per-frame rows; ``None`` marks a Missing frame."""
        data = [[np.nan] * 6 if row is None else list(row) for row in rows]
        return cls(np.array(data, dtype=np.float64).reshape(len(data), 6))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def frame_count(self) -> int:
        return self.values.shape[0]

    def is_missing(self, index: int) -> bool:
        return bool(np.isnan(self.values[index]).all())

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values).all(axis=1)

    @property
    def annotated_count(self) -> int:
        return int((~self.missing_mask).sum())

    def row(self, index: int) -> tuple[float, ...] | None:
        """Row values in file column order, or ``None`` when Missing."""
        if self.is_missing(index):
            return None
        return tuple(float(v) for v in self.values[index])

    def to_bytes(self) -> bytes:
        import io

        sink = io.BytesIO()
        write_gt(self, sink)
        return sink.getvalue()


def _bad_rows(values: np.ndarray) -> list[int]:
    nan = np.isnan(values)
    finite = np.isfinite(values)
    ok = nan.all(axis=1) | finite.all(axis=1)
    return [int(i) for i in np.flatnonzero(~ok)]


def _build_preamble(frame_count: int) -> bytes:
    header = "{'descr': '<f8', 'fortran_order': False, 'shape': (%d, 6), }" % frame_count
    base = len(MAGIC) + 2 + 2  # magic + version + length field
    padding = -(base + len(header) + 1) % _PREAMBLE_ALIGN
    header = header + " " * padding + "\n"
    return MAGIC + b"\x01\x00" + struct.pack("<H", len(header)) + header.encode("latin-1")


def write_gt(array: GtArray, sink: BinaryIO) -> int:
    """Serialize ``array`` to ``sink``; returns the byte count written.

    The output is deterministic: equal arrays produce byte-identical
    files, and every NaN is canonicalized to the quiet-NaN pattern.

    Raises:
        InvalidRow: A row mixes NaN and finite values (or holds an
            infinity).
        IoFailure: The sink failed.
    """
    bad = _bad_rows(array.values)
    if bad:
        raise InvalidRow(f"rows mixing NaN and finite values: {bad}")

    blob = bytearray(_build_preamble(array.frame_count))
    nan_row = _QUIET_NAN * 6
    for i in range(array.frame_count):
        if array.is_missing(i):
            blob += nan_row
        else:
            blob += struct.pack("<6d", *array.values[i])
    try:
        sink.write(bytes(blob))
    except OSError as exc:
        raise IoFailure(f"failed to write GT data: {exc}") from exc
    return len(blob)


def write_gt_file(array: GtArray, path) -> int:
    try:
        with open(path, "wb") as fh:
            return write_gt(array, fh)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _read_exact(source: BinaryIO, count: int, context: str) -> bytes:
    data = source.read(count)
    if len(data) != count:
        raise TruncatedData(f"{context}: expected {count} bytes, got {len(data)}")
    return data


def read_gt(source: BinaryIO) -> GtArray:
    """Parse a GT file from a binary stream.

    Any shape-(N, 6) little-endian float64 C-order payload is accepted
    regardless of header padding width.

    Raises:
        BadMagic, UnsupportedVersion, BadHeader, BadShape, MixedRow,
        TruncatedData: See class docstrings; the error names also
        surface verbatim in CLI output.
    """
    magic = source.read(len(MAGIC))
    if magic != MAGIC:
        raise BadMagic(f"not a GT array file (magic {magic!r})")
    version = _read_exact(source, 2, "version field")
    if version != b"\x01\x00":
        raise UnsupportedVersion(f"unsupported format version {version[0]}.{version[1]}")
    (header_len,) = struct.unpack("<H", _read_exact(source, 2, "header length field"))
    header_bytes = _read_exact(source, header_len, "header")

    try:
        header = ast.literal_eval(header_bytes.decode("latin-1").strip())
    except (ValueError, SyntaxError) as exc:
        raise BadHeader(f"unparseable header: {exc}") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise BadHeader(f"header must hold exactly descr/fortran_order/shape, got {header!r}")
    if header["descr"] != "<f8":
        raise BadHeader(f"dtype must be little-endian float64 ('<f8'), got {header['descr']!r}")
    if header["fortran_order"] is not False:
        raise BadHeader("fortran_order must be False")
    shape = header["shape"]
    if (
        not isinstance(shape, tuple)
        or len(shape) != 2
        or not all(isinstance(n, int) and n >= 0 for n in shape)
        or shape[1] != 6
    ):
        raise BadShape(f"shape must be (N, 6), got {shape!r}")

    frame_count = shape[0]
    data = _read_exact(source, frame_count * _ROW_BYTES, "data section")
    values = np.frombuffer(data, dtype="<f8").reshape(frame_count, 6).copy()

    bad = _bad_rows(values)
    if bad:
        raise MixedRow(f"rows mixing NaN and finite values: {bad}")
    return GtArray(values)


def read_gt_file(path) -> GtArray:
    try:
        with open(path, "rb") as fh:
            return read_gt(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _fmt(value: float) -> str:
    # 17 significant digits: enough to round-trip any float64 exactly.
    return format(value, ".17g")


def gt_to_text(array: GtArray, format: str) -> str:
    """Render the array as ``csv`` or ``json`` text.

    Missing frames become empty CSV fields / JSON nulls.  Floats are
    printed with 17 significant digits so the text round-trips.
    """
    if format == "csv":
        lines = ["frame," + ",".join(COLUMNS)]
        for i in range(array.frame_count):
            row = array.row(i)
            if row is None:
                lines.append(f"{i},,,,,,")
            else:
                lines.append(str(i) + "," + ",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"
    if format == "json":
        objects = []
        for i in range(array.frame_count):
            row = array.row(i)
            fields = [f'"frame":{i}']
            for name, value in zip(COLUMNS, row or [None] * 6):
                fields.append(f'"{name}":' + ("null" if value is None else _fmt(value)))
            objects.append("{" + ",".join(fields) + "}")
        return "[" + ",".join(objects) + "]"
    raise ValueError(f"unknown text format {format!r}; use 'csv' or 'json'")


def text_to_gt(text: str, format: str) -> GtArray:
    """Inverse of :func:`gt_to_text`, used for round-trip checking."""
    rows: list[list[float] | None] = []
    if format == "csv":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "frame," + ",".join(COLUMNS):
            raise BadHeader(f"bad CSV header: {lines[0] if lines else ''!r}")
        for line in lines[1:]:
            cells = line.split(",")[1:]
            if len(cells) != 6:
                raise BadShape(f"CSV row must have 6 value cells: {line!r}")
            empty = [c.strip() == "" for c in cells]
            if all(empty):
                rows.append(None)
            elif not any(empty):
                rows.append([float(c) for c in cells])
            else:
                raise MixedRow(f"CSV row mixes empty and numeric cells: {line!r}")
    elif format == "json":
        for i, obj in enumerate(json.loads(text)):
            values = [obj[name] for name in COLUMNS]
            if all(v is None for v in values):
                rows.append(None)
            elif not any(v is None for v in values):
                rows.append([float(v) for v in values])
            else:
                raise MixedRow(f"JSON object {i} mixes null and numeric values")
    else:
        raise ValueError(f"unknown text format {format!r}; use 'csv' or 'json'")
    return GtArray.from_rows(rows)


@dataclass(frozen=True)
class GtDiffReport:
    """Frame-wise |delta Y| / |delta phi| statistics between two GT arrays."""

    compared_frames: int
    skipped_frames: int
    mean_abs_dy: float
    max_abs_dy: float
    mean_abs_dphi: float
    max_abs_dphi: float
    per_frame: list[tuple[int, float, float]] = field(default_factory=list)


def gt_diff(a: GtArray, b: GtArray) -> GtDiffReport:
    """Compare two same-length GT arrays frame by frame.

    Frames Missing in either input are skipped (and counted); position
    and tilt deltas are aggregated over the mutually annotated frames.

    Raises:
        LengthMismatch: The arrays have different row counts.
    """
    if a.frame_count != b.frame_count:
        raise LengthMismatch(
            f"GT arrays differ in length: {a.frame_count} != {b.frame_count}"
        )
    per_frame: list[tuple[int, float, float]] = []
    for i in range(a.frame_count):
        if a.is_missing(i) or b.is_missing(i):
            continue
        dy = abs(float(a.values[i, 0]) - float(b.values[i, 0]))
        dphi = abs(float(a.values[i, 1]) - float(b.values[i, 1]))
        per_frame.append((i, dy, dphi))

    compared = len(per_frame)
    dys = [dy for _, dy, _ in per_frame]
    dphis = [dphi for _, _, dphi in per_frame]
    return GtDiffReport(
        compared_frames=compared,
        skipped_frames=a.frame_count - compared,
        mean_abs_dy=math.fsum(dys) / compared if compared else 0.0,
        max_abs_dy=max(dys) if compared else 0.0,
        mean_abs_dphi=math.fsum(dphis) / compared if compared else 0.0,
        max_abs_dphi=max(dphis) if compared else 0.0,
        per_frame=per_frame,
    )
