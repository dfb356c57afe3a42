import cv2
import numpy as np
import pytest

from horizon_annotator.frame_source import FrameSource, SourceInfo
from horizon_annotator.geometry import FrameDims


def synthetic_frame(index: int, width: int, height: int) -> np.ndarray:
    """Deterministic BGR test pattern, distinct per frame index."""
    frame = np.zeros((height, width, 3), np.uint8)
    frame[:, :, 0] = (index * 7) % 256
    frame[:, :, 1] = np.linspace(0, 255, width, dtype=np.uint8)[None, :]
    frame[:, :, 2] = np.linspace(0, 255, height, dtype=np.uint8)[:, None]
    return frame


def make_video(path, frame_count, width=64, height=48):
    """Write a small test video; fourcc picked from the extension."""
    fourcc = cv2.VideoWriter_fourcc(*("mp4v" if path.suffix == ".mp4" else "MJPG"))
    writer = cv2.VideoWriter(str(path), fourcc, 30.0, (width, height))
    assert writer.isOpened(), f"cannot open video writer for {path}"
    for i in range(frame_count):
        writer.write(synthetic_frame(i, width, height))
    writer.release()
    return path


def make_image_dir(path, frame_count, width=64, height=48, ext=".png"):
    path.mkdir(parents=True, exist_ok=True)
    for i in range(frame_count):
        assert cv2.imwrite(str(path / f"frame_{i:04d}{ext}"), synthetic_frame(i, width, height))
    return path


class ArraySource(FrameSource):
    """In-memory source for session tests that do not need real decoding."""

    def __init__(self, frame_count=10, width=64, height=48, name="clip.mp4", cache_frames=32):
        from pathlib import Path

        info = SourceInfo(frame_count, FrameDims(width, height), "video", Path(f"/virtual/{name}"))
        super().__init__(info, cache_frames)
        self.decoded = []

    def _decode(self, index):
        self.decoded.append(index)
        bgr = synthetic_frame(index, self.info.dims.width, self.info.dims.height)
        return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)


@pytest.fixture
def image_dir(tmp_path):
    return make_image_dir(tmp_path / "frames", 10)


@pytest.fixture
def small_video(tmp_path):
    return make_video(tmp_path / "clip.mp4", 10)
