"""Frame extraction, frame-prompt pairing, and the content-addressed cache."""

from __future__ import annotations

import concurrent.futures

import numpy as np
import pytest

from conftest import synthetic_frames
from sstem.backends import BackendId
from sstem.errors import EmptyVideoError, IdMismatchError, UnreadableVideoError
from sstem.ingestion import CacheEntry, FrameCache, extract_frames, pair_with_prompt
from sstem.model import Frame, VideoEntry, frame_content_hash


def entry_for(path, video_id="v1", prompt="turn the jeep into a red car") -> VideoEntry:
    return VideoEntry(
        video_id=video_id,
        original_path=str(path),
        edited_path=str(path),
        edit_prompt=prompt,
        model_name="editor-a",
    )


class TestExtractFrames:
    def test_stride_one_keeps_all_frames(self, tmp_video):
        path, frames = tmp_video(n=16)
        seq = extract_frames(entry_for(path), stride=1)
        assert seq.n_frames == 16
        assert [f.index for f in seq.frames] == list(range(16))

    def test_stride_four_keeps_every_fourth(self, tmp_video):
        path, _ = tmp_video(n=16)
        seq = extract_frames(entry_for(path), stride=4)
        assert seq.n_frames == 4
        assert [f.index for f in seq.frames] == [0, 4, 8, 12]

    def test_missing_file_unreadable(self, tmp_path):
        with pytest.raises(UnreadableVideoError):
            extract_frames(entry_for(tmp_path / "nope.avi"))

    def test_corrupt_file_unreadable_or_empty(self, tmp_path):
        path = tmp_path / "garbage.avi"
        path.write_bytes(b"not really a video")
        with pytest.raises((UnreadableVideoError, EmptyVideoError)):
            extract_frames(entry_for(path))

    def test_lossless_decode_round_trips_pixels(self, tmp_video):
        path, frames = tmp_video(n=4)
        seq = extract_frames(entry_for(path))
        for written, decoded in zip(frames, seq.frames):
            assert np.array_equal(written, decoded.image)

    def test_hashes_deterministic_across_runs(self, tmp_video):
        path, _ = tmp_video(n=6)
        first = [f.content_hash for f in extract_frames(entry_for(path)).frames]
        second = [f.content_hash for f in extract_frames(entry_for(path)).frames]
        assert first == second

    def test_invalid_stride(self, tmp_video):
        path, _ = tmp_video(n=2)
        with pytest.raises(ValueError):
            extract_frames(entry_for(path), stride=0)


class TestPairWithPrompt:
    def test_one_pair_per_frame_with_the_prompt(self, tmp_video):
        path, _ = tmp_video(n=5)
        entry = entry_for(path)
        seq = extract_frames(entry)
        pairs = pair_with_prompt(seq, entry)
        assert len(pairs) == 5
        assert all(prompt == entry.edit_prompt for _, prompt in pairs)

    def test_single_frame_sequence(self, tmp_video):
        path, _ = tmp_video(n=1)
        entry = entry_for(path)
        pairs = pair_with_prompt(extract_frames(entry), entry)
        assert len(pairs) == 1

    def test_id_mismatch(self, tmp_video):
        path, _ = tmp_video(n=2)
        seq = extract_frames(entry_for(path, video_id="v1"))
        with pytest.raises(IdMismatchError):
            pair_with_prompt(seq, entry_for(path, video_id="v2"))


BACKEND = BackendId("captioner", "mock", "1")


class TestFrameCache:
    def test_put_then_get_round_trips_bytes(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        cache.put("abc123", "caption", BACKEND, b"hello world")
        assert cache.get("abc123", "caption", BACKEND) == b"hello world"

    def test_absent_key_returns_none(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        assert cache.get("missing", "caption", BACKEND) is None

    def test_identical_pixels_share_one_slot_per_artifact_kind(self, tmp_path):
        # hash two identical synthetic frames and compare
        pixels = synthetic_frames(1, seed=5)[0]
        first = Frame(index=0, image=pixels.copy())
        second = Frame(index=9, image=pixels.copy())
        assert first.content_hash == second.content_hash == frame_content_hash(pixels)

        cache = FrameCache(tmp_path / "cache")
        cache.put(first.content_hash, "caption", BACKEND, b"one")
        cache.put(second.content_hash, "caption", BACKEND, b"one")
        assert len(cache.entries()) == 1

    def test_key_components_separate_entries(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        other_backend = BackendId("captioner", "mock", "2")
        cache.put("h1", "caption", BACKEND, b"a")
        cache.put("h1", "caption", other_backend, b"b")
        cache.put("h1", "detections", BACKEND, b"c")
        assert cache.get("h1", "caption", BACKEND) == b"a"
        assert cache.get("h1", "caption", other_backend) == b"b"
        assert cache.get("h1", "detections", BACKEND) == b"c"

    def test_empty_key_fields_rejected(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        with pytest.raises(ValueError):
            cache.put("", "caption", BACKEND, b"x")
        with pytest.raises(ValueError):
            cache.get("h", "", BACKEND)

    def test_concurrent_writers_identical_payloads(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        payload = b"z" * 4096

        def write(_):
            cache.put("deadbeef", "frameembedding", BACKEND, payload)
            return cache.get("deadbeef", "frameembedding", BACKEND)

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(write, range(64)))
        assert all(r == payload for r in results)
        assert cache.get("deadbeef", "frameembedding", BACKEND) == payload

    def test_entries_listing(self, tmp_path):
        cache = FrameCache(tmp_path / "cache")
        cache.put("aa", "caption", BACKEND, b"x")
        entries = cache.entries()
        assert len(entries) == 1
        assert isinstance(entries[0], CacheEntry)
        assert entries[0].content_hash == "aa"
        assert entries[0].artifact_kind == "caption"
        assert entries[0].payload == b"x"
