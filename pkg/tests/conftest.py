"""Shared test helpers: synthetic video files and frame sequences."""

from __future__ import annotations

import sys
from pathlib import Path

import cv2
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sstem.model import Frame, FrameSequence

# FFV1 is lossless, so decoded pixels match what was written bit for bit.
LOSSLESS_FOURCC = "FFV1"


def synthetic_frames(n: int, seed: int, height: int = 24, width: int = 32) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8) for _ in range(n)]


def write_video(path: Path, frames: list[np.ndarray], fps: float = 8.0) -> None:
    height, width = frames[0].shape[:2]
    fourcc = cv2.VideoWriter_fourcc(*LOSSLESS_FOURCC)
    writer = cv2.VideoWriter(str(path), fourcc, fps, (width, height))
    assert writer.isOpened(), f"could not open video writer for {path}"
    for frame in frames:
        writer.write(cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    writer.release()


def sequence_from_arrays(video_id: str, arrays: list[np.ndarray], stride: int = 1) -> FrameSequence:
    frames = tuple(Frame(index=i * stride, image=a) for i, a in enumerate(arrays))
    return FrameSequence(video_id=video_id, frames=frames, fps=8.0, stride=stride)


@pytest.fixture
def tmp_video(tmp_path):
    """Factory writing a lossless synthetic clip; returns (path, frames)."""

    def _make(name: str = "clip.avi", n: int = 8, seed: int = 0):
        frames = synthetic_frames(n, seed)
        path = tmp_path / name
        write_video(path, frames)
        return path, frames

    return _make
