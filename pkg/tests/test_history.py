from __future__ import annotations

import random

import numpy as np
import pytest

from perfcity.errors import OutOfOrderFrameError, SeekOutOfRangeError
from perfcity.history import (
    HistoryBuffer,
    ViewCursor,
    scatter_matrix,
    set_cursor,
    visible_position,
)
from perfcity.protocol import MetricFrame


def frame(index: int, counts=None) -> MetricFrame:
    return MetricFrame(window_index=index, window_start_ms=index * 100, counts=counts or {})


def test_fifo_eviction():
    buf = HistoryBuffer(3)
    for i in range(4):
        buf.push(frame(i))
    assert [f.window_index for f in buf.snapshot()] == [1, 2, 3]
    assert buf.total_pushed == 4


def test_out_of_order_push_rejected():
    buf = HistoryBuffer(3)
    buf.push(frame(5))
    with pytest.raises(OutOfOrderFrameError):
        buf.push(frame(5))
    with pytest.raises(OutOfOrderFrameError):
        buf.push(frame(2))
    assert buf.total_pushed == 1


def test_buffer_matches_plain_list_oracle():
    rng = random.Random(808)
    capacity = rng.randint(1, 20)
    buf = HistoryBuffer(capacity)
    oracle: list[MetricFrame] = []
    index = -1
    for _ in range(500):
        index += rng.randint(1, 3)  # gaps allowed, order strict
        f = frame(index, {"c": rng.randint(1, 9)})
        buf.push(f)
        oracle.append(f)
        assert list(buf.snapshot()) == oracle[-min(len(oracle), capacity):]


def test_cursor_pause_freezes_at_newest():
    buf = HistoryBuffer(10)
    for i in range(11):
        buf.push(frame(i))
    cursor = set_cursor(ViewCursor(), "pause", buf)
    assert cursor.mode == "paused"
    assert cursor.position == 10


def test_cursor_seek_within_range():
    buf = HistoryBuffer(10)
    for i in range(11):
        buf.push(frame(i))
    cursor = set_cursor(ViewCursor("paused", 10), "seek", buf, arg=7)
    assert cursor.position == 7


def test_seek_evicted_index_raises():
    buf = HistoryBuffer(5)
    for i in range(10):
        buf.push(frame(i))
    with pytest.raises(SeekOutOfRangeError):
        set_cursor(ViewCursor(), "seek", buf, arg=2)
    with pytest.raises(SeekOutOfRangeError):
        set_cursor(ViewCursor(), "seek", buf, arg=99)


def test_resume_returns_to_live():
    buf = HistoryBuffer(5)
    buf.push(frame(0))
    cursor = set_cursor(ViewCursor(), "pause", buf)
    cursor = set_cursor(cursor, "resume", buf)
    assert cursor.mode == "live"
    assert visible_position(cursor, buf) == 0


def test_scatter_matrix_direct_lookup():
    buf = HistoryBuffer(5)
    buf.push(frame(0, {"A": 3}))
    buf.push(frame(1, {"B": 1}))
    m = scatter_matrix(buf, ["A", "B"], ViewCursor())
    assert m.values.tolist() == [[3, 0], [0, 1]]
    assert m.col_windows == (0, 1)
    assert m.row_ids == ("A", "B")
    assert m.mark_mask.tolist() == [[True, False], [False, True]]


def test_scatter_matrix_empty_buffer():
    buf = HistoryBuffer(5)
    m = scatter_matrix(buf, ["A", "B"], ViewCursor())
    assert m.values.shape == (2, 0)
    assert m.col_windows == ()


def test_paused_matrix_excludes_newer_frames():
    rng = random.Random(11)
    buf = HistoryBuffer(50)
    history: list[MetricFrame] = []
    for i in range(30):
        f = frame(i, {"A": rng.randint(1, 5)} if rng.random() < 0.6 else {})
        buf.push(f)
        history.append(f)
    cursor = set_cursor(ViewCursor(), "seek", buf, arg=17)
    m = scatter_matrix(buf, ["A"], cursor)
    visible = [f for f in history if f.window_index <= 17]  # plain-list oracle
    assert m.col_windows == tuple(f.window_index for f in visible)
    assert m.values.tolist() == [[f.counts.get("A", 0) for f in visible]]


def test_resume_after_k_pushes_shows_k_more_columns():
    buf = HistoryBuffer(100)
    for i in range(10):
        buf.push(frame(i, {"A": 1}))
    paused = set_cursor(ViewCursor(), "pause", buf)
    before = scatter_matrix(buf, ["A"], paused)
    for i in range(10, 15):
        buf.push(frame(i, {"A": 2}))
    still_paused = scatter_matrix(buf, ["A"], paused)
    assert still_paused.values.shape == before.values.shape
    live = scatter_matrix(buf, ["A"], set_cursor(paused, "resume", buf))
    assert live.values.shape[1] == before.values.shape[1] + 5


def test_matrix_cells_match_frame_counts_scaled():
    rng = random.Random(2024)
    buf = HistoryBuffer(40)
    order = [f"c{i}" for i in range(6)]
    frames = []
    for i in range(60):
        counts = {
            cid: rng.randint(1, 100) for cid in order if rng.random() < 0.3
        }
        f = frame(i, counts)
        buf.push(f)
        frames.append(f)
    m = scatter_matrix(buf, order, ViewCursor())
    kept = frames[-40:]
    expected = np.array(
        [[f.counts.get(cid, 0) for f in kept] for cid in order], dtype=np.int64
    )
    assert np.array_equal(m.values, expected)
