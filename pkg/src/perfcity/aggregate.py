"""Fixed-length window aggregation of call events into metric frames.

Windowing is driven by event timestamps, not arrival time, so replays are
speed-invariant. Window ``k`` covers ``[k*window_ms, (k+1)*window_ms)``
milliseconds from the stream epoch. Every elapsed window emits a frame,
including all-idle ones. Events stamped before the open window are dropped
and tallied, never merged backward: emitted frames are immutable.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable

from .model import SystemModel
from .protocol import CallEvent, MetricFrame


class WindowAggregator:
    """Single-writer streaming aggregator.

    ``add_event`` and ``advance_to`` return the frames they close, oldest
    first. Dropped events are tallied in ``drops`` by reason
    (``"late"`` / ``"unknown_class"``), counting whole events.
    """

    def __init__(self, window_ms: int, model: SystemModel):
        if window_ms < 1:
            raise ValueError("window_ms must be >= 1")
        self.window_ms = window_ms
        self._model = model
        self._index = 0
        self._counts: Counter[str] = Counter()
        self.drops: Counter[str] = Counter()
        self.accepted_events = 0

    @property
    def current_index(self) -> int:
        """Index of the currently open window."""
        return self._index

    @property
    def current_window_start_ms(self) -> int:
        return self._index * self.window_ms

    def set_model(self, model: SystemModel) -> None:
        """Swap the active model; open-window counts for removed classes
        are filtered (and tallied) when the window closes."""
        self._model = model

    def add_event(self, event: CallEvent) -> list[MetricFrame]:
        if event.timestamp_ms < self.current_window_start_ms:
            self.drops["late"] += 1
            return []
        if event.class_id not in self._model.classes:
            self.drops["unknown_class"] += 1
            return []
        frames = self._advance_to_index(event.timestamp_ms // self.window_ms)
        self._counts[event.class_id] += event.count
        self.accepted_events += 1
        return frames

    def advance_to(self, timestamp_ms: int) -> list[MetricFrame]:
        """Close every window whose end lies at or before ``timestamp_ms``."""
        return self._advance_to_index(max(timestamp_ms, 0) // self.window_ms)

    def flush(self) -> MetricFrame:
        """Close the open window now (possibly partial, possibly empty)."""
        return self._close_current()

    def _advance_to_index(self, target_index: int) -> list[MetricFrame]:
        frames = []
        while self._index < target_index:
            frames.append(self._close_current())
        return frames

    def _close_current(self) -> MetricFrame:
        counts: dict[str, int] = {}
        for class_id, total in self._counts.items():
            if class_id in self._model.classes:
                counts[class_id] = total
            else:
                # class removed by a model update while the window was open
                self.drops["unknown_class"] += 1
        frame = MetricFrame(
            window_index=self._index,
            window_start_ms=self.current_window_start_ms,
            counts=counts,
        )
        self._index += 1
        self._counts.clear()
        return frame


def window_aggregate(
    events: Iterable[CallEvent],
    window_ms: int,
    model: SystemModel,
    end_ms: int | None = None,
) -> list[MetricFrame]:
    """Aggregate a time-ordered event stream into frames.

    With ``end_ms`` given, all windows fully elapsed by ``end_ms`` are
    emitted (idle ones included). Without it, the window containing the
    final event is flushed as the last frame.
    """
    agg = WindowAggregator(window_ms, model)
    frames: list[MetricFrame] = []
    saw_event = False
    for event in events:
        saw_event = True
        frames.extend(agg.add_event(event))
    if end_ms is not None:
        frames.extend(agg.advance_to(end_ms))
    elif saw_event:
        frames.append(agg.flush())
    return frames
