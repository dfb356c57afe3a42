"""Indexed access to decoded video frames.

Two sources are supported: ``.avi`` / ``.mp4`` video files (decoded
through OpenCV) and directories of equally-sized images, which give
deterministic fixtures for tests.  Frame decoding never trusts
container metadata for the frame count; the stream is scanned once at
open time so the count always matches what can actually be decoded.

Frames are served through a bounded LRU cache because annotation
browsing revisits nearby frames constantly.  Decoding is strictly
sequential (no codec seeking), so repeated requests for the same index
return bit-identical rasters.
"""

from __future__ import annotations

import abc
import threading
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from PIL import Image

from .errors import AnnotatorError
from .geometry import FrameDims

VIDEO_EXTENSIONS = {".avi", ".mp4"}
IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp"}

DEFAULT_CACHE_FRAMES = 32


class FrameSourceError(AnnotatorError):
    """Base class for frame source errors."""


class UnsupportedFormat(FrameSourceError):
    code = "unsupported_format"


class DecodeFailure(FrameSourceError):
    code = "decode_failure"


class EmptySource(FrameSourceError):
    code = "empty_source"


class InconsistentDims(FrameSourceError):
    code = "inconsistent_dims"


class IndexOutOfRange(FrameSourceError):
    code = "index_out_of_range"


@dataclass(frozen=True)
class SourceInfo:
    frame_count: int
    dims: FrameDims
    kind: str  # "video" | "image_directory"
    uri: Path

    @property
    def stem(self) -> str:
        """Name the GT file is derived from (filename without extension)."""
        return self.uri.stem if self.kind == "video" else self.uri.name


@dataclass(frozen=True)
class Frame:
    """One decoded RGB frame.  ``pixels`` is a read-only HxWx3 uint8 array."""

    index: int
    pixels: np.ndarray


class FrameSource(abc.ABC):
    """Thread-safe indexed frame provider with an LRU decode cache."""

    def __init__(self, info: SourceInfo, cache_frames: int = DEFAULT_CACHE_FRAMES):
        self.info = info
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_frames = max(1, cache_frames)
        self._lock = threading.RLock()

    def get_frame(self, index: int) -> Frame:
        """Frame ``index`` as RGB pixels; identical bytes on every call."""
        if not 0 <= index < self.info.frame_count:
            raise IndexOutOfRange(
                f"frame index {index} out of range [0, {self.info.frame_count - 1}]"
            )
        with self._lock:
            pixels = self._cache.get(index)
            if pixels is not None:
                self._cache.move_to_end(index)
                return Frame(index, pixels)
            pixels = self._decode(index)
            expected = (self.info.dims.height, self.info.dims.width, 3)
            if pixels.shape != expected:
                raise InconsistentDims(
                    f"frame {index} has shape {pixels.shape[:2]}, expected {expected[:2]}"
                )
            pixels.setflags(write=False)
            self._cache[index] = pixels
            while len(self._cache) > self._cache_frames:
                self._cache.popitem(last=False)
            return Frame(index, pixels)

    @abc.abstractmethod
    def _decode(self, index: int) -> np.ndarray:
        """Decode frame ``index`` as an RGB uint8 array."""

    def close(self) -> None:
        pass

    def __enter__(self) -> "FrameSource":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class VideoSource(FrameSource):
    """Sequentially decoded ``.avi`` / ``.mp4`` video file."""

    def __init__(self, path: Path, cache_frames: int = DEFAULT_CACHE_FRAMES):
        path = Path(path)
        frame_count = self._count_frames(path)
        if frame_count == 0:
            raise EmptySource(f"no decodable frames in {path}")

        self._cap = cv2.VideoCapture(str(path))
        self._next = 0
        ok, first = self._cap.read()
        if not ok or first is None:
            raise DecodeFailure(f"cannot decode first frame of {path}")
        self._next = 1
        height, width = first.shape[:2]
        info = SourceInfo(frame_count, FrameDims(width, height), "video", path)
        super().__init__(info, cache_frames)
        # Keep the already decoded first frame; the display opens on it.
        first = cv2.cvtColor(first, cv2.COLOR_BGR2RGB)
        first.setflags(write=False)
        self._cache[0] = first

    @staticmethod
    def _count_frames(path: Path) -> int:
        # Container metadata lies often enough that the GT row count
        # cannot depend on it; count by exhausting the stream.
        cap = cv2.VideoCapture(str(path))
        try:
            if not cap.isOpened():
                raise DecodeFailure(f"cannot open video {path}")
            count = 0
            while cap.grab():
                count += 1
            return count
        finally:
            cap.release()

    def _rewind(self) -> None:
        self._cap.release()
        self._cap = cv2.VideoCapture(str(self.info.uri))
        self._next = 0

    def _decode(self, index: int) -> np.ndarray:
        # Positional seeking is codec-dependent; decode forward from the
        # last position (or from the start) so results are reproducible.
        if index < self._next:
            self._rewind()
        frame = None
        while self._next <= index:
            ok, frame = self._cap.read()
            if not ok or frame is None:
                raise DecodeFailure(f"decode failed at frame {self._next} of {self.info.uri}")
            self._next += 1
        return cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)

    def close(self) -> None:
        self._cap.release()


class ImageDirectorySource(FrameSource):
    """Directory of images, ordered lexicographically by filename."""

    def __init__(self, directory: Path, cache_frames: int = DEFAULT_CACHE_FRAMES):
        directory = Path(directory)
        self._files = sorted(
            (p for p in directory.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS),
            key=lambda p: p.name,
        )
        if not self._files:
            raise EmptySource(f"no image files in {directory}")

        dims = None
        for p in self._files:
            try:
                with Image.open(p) as img:  # header read only, no decode
                    size = img.size
            except OSError as exc:
                raise DecodeFailure(f"cannot read image header of {p}: {exc}") from exc
            if dims is None:
                dims = size
            elif size != dims:
                raise InconsistentDims(
                    f"{p.name} is {size[0]}x{size[1]}, expected {dims[0]}x{dims[1]}"
                )
        info = SourceInfo(
            len(self._files), FrameDims(dims[0], dims[1]), "image_directory", directory
        )
        super().__init__(info, cache_frames)

    def _decode(self, index: int) -> np.ndarray:
        bgr = cv2.imread(str(self._files[index]), cv2.IMREAD_COLOR)
        if bgr is None:
            raise DecodeFailure(f"cannot decode image {self._files[index]}")
        return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)


def open_source(uri, cache_frames: int = DEFAULT_CACHE_FRAMES) -> FrameSource:
    """Open a video file or image directory for indexed frame access.

    Raises:
        FileNotFoundError: ``uri`` does not exist.
        UnsupportedFormat: A file with an extension other than ``.avi``
            or ``.mp4``.
        EmptySource, DecodeFailure, InconsistentDims: Probe failures.
    """
    path = Path(uri)
    if not path.exists():
        raise FileNotFoundError(f"no such file or directory: {path}")
    if path.is_dir():
        return ImageDirectorySource(path, cache_frames)
    if path.suffix.lower() not in VIDEO_EXTENSIONS:
        raise UnsupportedFormat(
            f"unsupported video format {path.suffix!r}; supported: .avi, .mp4"
        )
    return VideoSource(path, cache_frames)


def probe(uri) -> SourceInfo:
    """Open ``uri`` just long enough to report its frame count and size."""
    source = open_source(uri, cache_frames=1)
    try:
        return source.info
    finally:
        source.close()
