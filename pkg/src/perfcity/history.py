"""Fixed-capacity frame history and the live/paused view cursor.

The buffer is the scatter plot's backing store: one frame per column,
oldest evicted first. Rewinding is view-only; the cursor never mutates
buffered frames, it just bounds which columns are visible.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import OutOfOrderFrameError, SeekOutOfRangeError
from .protocol import MetricFrame

LIVE = "live"
PAUSED = "paused"


class HistoryBuffer:
    """FIFO of recent frames, strictly increasing in window index."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._frames: deque[MetricFrame] = deque(maxlen=capacity)
        self.total_pushed = 0

    def __len__(self) -> int:
        return len(self._frames)

    def push(self, frame: MetricFrame) -> None:
        newest = self.newest_index()
        if newest is not None and frame.window_index <= newest:
            raise OutOfOrderFrameError(
                f"frame {frame.window_index} not newer than buffered {newest}"
            )
        self._frames.append(frame)
        self.total_pushed += 1

    def snapshot(self) -> tuple[MetricFrame, ...]:
        """Immutable view of the buffered frames, oldest first."""
        return tuple(self._frames)

    def oldest_index(self) -> int | None:
        return self._frames[0].window_index if self._frames else None

    def newest_index(self) -> int | None:
        return self._frames[-1].window_index if self._frames else None

    def has_window(self, window_index: int) -> bool:
        return any(f.window_index == window_index for f in self._frames)

    def frame_at(self, window_index: int) -> MetricFrame | None:
        for frame in self._frames:
            if frame.window_index == window_index:
                return frame
        return None


@dataclass(frozen=True)
class ViewCursor:
    """Newest visible column: tracks the buffer head while live, frozen
    at ``position`` while paused."""

    mode: str = LIVE
    position: int | None = None


def set_cursor(
    cursor: ViewCursor,
    action: str,
    buffer: HistoryBuffer,
    arg: int | None = None,
) -> ViewCursor:
    """Apply a pause / resume / seek action, returning the new cursor."""
    if action == "pause":
        return ViewCursor(mode=PAUSED, position=buffer.newest_index())
    if action == "resume":
        return ViewCursor(mode=LIVE, position=None)
    if action == "seek":
        if arg is None or not buffer.has_window(arg):
            raise SeekOutOfRangeError(f"window {arg} is not buffered")
        return ViewCursor(mode=PAUSED, position=arg)
    raise ValueError(f"unknown cursor action {action!r}")


def visible_position(cursor: ViewCursor, buffer: HistoryBuffer) -> int | None:
    if cursor.mode == LIVE:
        return buffer.newest_index()
    return cursor.position


@dataclass(frozen=True)
class ScatterMatrix:
    """Rows follow the model's class order, columns the visible frames
    (oldest left). A zero cell means the class drew no mark that window."""

    values: np.ndarray
    row_ids: tuple[str, ...]
    col_windows: tuple[int, ...]

    @property
    def mark_mask(self) -> np.ndarray:
        return self.values > 0


def scatter_matrix(
    buffer: HistoryBuffer,
    order: Sequence[str],
    cursor: ViewCursor,
) -> ScatterMatrix:
    """Extract the scatter-plot matrix visible under ``cursor``."""
    limit = visible_position(cursor, buffer)
    if limit is None:
        frames: tuple[MetricFrame, ...] = ()
    else:
        frames = tuple(f for f in buffer.snapshot() if f.window_index <= limit)
    values = np.zeros((len(order), len(frames)), dtype=np.int64)
    for col, frame in enumerate(frames):
        for row, class_id in enumerate(order):
            count = frame.counts.get(class_id, 0)
            if count:
                values[row, col] = count
    return ScatterMatrix(
        values=values,
        row_ids=tuple(order),
        col_windows=tuple(f.window_index for f in frames),
    )
