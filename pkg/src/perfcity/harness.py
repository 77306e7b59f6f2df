"""Synthetic workload generation and trace replay over the wire protocol.

The generator stands in for an in-process profiler: given per-class mean
call rates it draws a seeded Poisson process per class and writes the
resulting events, model record first, as a line-delimited trace. An
optional burst multiplies one class's rate inside an interval, the minimal
reproducible performance regression.

The replayer streams a trace to a listening server, preserving relative
event timing scaled by 1/speed. Because windowing downstream is
event-timestamp driven, frame contents are replay-speed invariant.
"""

from __future__ import annotations

import asyncio
import json
import time
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidSpecError, MalformedTraceError, ProtocolError
from .model import SystemModel, class_order, validate_model
from .protocol import CallEvent, ModelRecord, decode_record, encode_model, encode_record


@dataclass(frozen=True)
class Burst:
    start_ms: int
    end_ms: int
    class_id: str
    multiplier: float


@dataclass(frozen=True)
class WorkloadSpec:
    model: SystemModel
    duration_ms: int
    seed: int
    hot_classes: tuple[tuple[str, float], ...] = ()
    baseline_calls_per_second: float = 0.0
    burst: Burst | None = None

    def validate(self) -> None:
        if self.duration_ms < 1:
            raise InvalidSpecError("durationMs must be >= 1")
        if self.baseline_calls_per_second < 0:
            raise InvalidSpecError("baselineCallsPerSecond must be >= 0")
        for class_id, rate in self.hot_classes:
            if rate < 0:
                raise InvalidSpecError(f"rate for {class_id!r} must be >= 0")
            if class_id not in self.model.classes:
                raise InvalidSpecError(f"hot class {class_id!r} not in model")
        if self.burst is not None:
            b = self.burst
            if b.class_id not in self.model.classes:
                raise InvalidSpecError(f"burst class {b.class_id!r} not in model")
            if b.multiplier < 0:
                raise InvalidSpecError("burst multiplier must be >= 0")
            if not (0 <= b.start_ms < b.end_ms <= self.duration_ms):
                raise InvalidSpecError("burst interval must lie within the duration")


def load_workload_spec(source: Mapping[str, Any] | str | Path) -> WorkloadSpec:
    """Read a workload spec from a mapping or a JSON file."""
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidSpecError(f"cannot read workload spec: {exc}") from exc
    else:
        data = source
    if not isinstance(data, Mapping):
        raise InvalidSpecError("workload spec must be a JSON object")
    try:
        model = validate_model(data["model"])
        hot = tuple(
            (h["classId"], float(h["meanCallsPerSecond"]))
            for h in data.get("hotClasses", [])
        )
        burst = None
        if data.get("burst") is not None:
            b = data["burst"]
            burst = Burst(
                start_ms=int(b["startMs"]),
                end_ms=int(b["endMs"]),
                class_id=b["classId"],
                multiplier=float(b["multiplier"]),
            )
        spec = WorkloadSpec(
            model=model,
            duration_ms=int(data["durationMs"]),
            seed=int(data.get("seed", 0)),
            hot_classes=hot,
            baseline_calls_per_second=float(data.get("baselineCallsPerSecond", 0.0)),
            burst=burst,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"bad workload spec field: {exc}") from exc
    spec.validate()
    return spec


def workload_spec_to_payload(spec: WorkloadSpec) -> dict[str, Any]:
    from .model import model_to_payload

    payload: dict[str, Any] = {
        "model": model_to_payload(spec.model),
        "durationMs": spec.duration_ms,
        "seed": spec.seed,
        "hotClasses": [
            {"classId": cid, "meanCallsPerSecond": rate} for cid, rate in spec.hot_classes
        ],
        "baselineCallsPerSecond": spec.baseline_calls_per_second,
    }
    if spec.burst is not None:
        payload["burst"] = {
            "startMs": spec.burst.start_ms,
            "endMs": spec.burst.end_ms,
            "classId": spec.burst.class_id,
            "multiplier": spec.burst.multiplier,
        }
    return payload


@dataclass(frozen=True)
class TraceFile:
    """Ordered wire-record lines: one model record, then events."""

    lines: tuple[str, ...]

    def validate(self) -> None:
        if not self.lines:
            raise MalformedTraceError("trace is empty")
        try:
            first = decode_record(self.lines[0])
        except ProtocolError as exc:
            raise MalformedTraceError(f"bad first record: {exc}") from exc
        if not isinstance(first, ModelRecord):
            raise MalformedTraceError("first trace record must be a model record")
        previous = -1
        for n, line in enumerate(self.lines[1:], start=2):
            try:
                record = decode_record(line)
            except ProtocolError as exc:
                raise MalformedTraceError(f"bad record on line {n}: {exc}") from exc
            if not isinstance(record, CallEvent):
                raise MalformedTraceError(f"line {n}: expected an event record")
            if record.timestamp_ms < previous:
                raise MalformedTraceError(f"line {n}: timestamps decrease")
            previous = record.timestamp_ms

    def model(self) -> SystemModel:
        return validate_model(decode_record(self.lines[0]))

    def events(self) -> Iterator[CallEvent]:
        for line in self.lines[1:]:
            record = decode_record(line)
            assert isinstance(record, CallEvent)
            yield record

    def write(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.lines) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> TraceFile:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise MalformedTraceError(f"cannot read trace: {exc}") from exc
        trace = cls(lines=tuple(line for line in text.splitlines() if line))
        trace.validate()
        return trace


def generate_workload(spec: WorkloadSpec) -> TraceFile:
    """Deterministic trace for a workload spec (same spec+seed, same bytes)."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    duration_s = spec.duration_ms / 1000.0
    rates = dict(spec.hot_classes)

    stamps: list[np.ndarray] = []
    ids: list[np.ndarray] = []
    # class_order gives a stable iteration order, so draws are reproducible
    for position, class_id in enumerate(class_order(spec.model)):
        rate = rates.get(class_id, spec.baseline_calls_per_second)
        n = int(rng.poisson(rate * duration_s)) if rate > 0 else 0
        if n:
            stamps.append(rng.integers(0, spec.duration_ms, size=n, dtype=np.int64))
            ids.append(np.full(n, position, dtype=np.int64))
        if (
            spec.burst is not None
            and spec.burst.class_id == class_id
            and spec.burst.multiplier > 1
        ):
            extra_rate = rate * (spec.burst.multiplier - 1)
            span_s = (spec.burst.end_ms - spec.burst.start_ms) / 1000.0
            n_extra = int(rng.poisson(extra_rate * span_s)) if extra_rate > 0 else 0
            if n_extra:
                stamps.append(
                    rng.integers(
                        spec.burst.start_ms, spec.burst.end_ms, size=n_extra, dtype=np.int64
                    )
                )
                ids.append(np.full(n_extra, position, dtype=np.int64))

    order = class_order(spec.model)
    lines = [encode_model(spec.model)]
    if stamps:
        all_ts = np.concatenate(stamps)
        all_ids = np.concatenate(ids)
        sort = np.lexsort((all_ids, all_ts))
        for ts, pos in zip(all_ts[sort], all_ids[sort]):
            lines.append(
                encode_record(CallEvent(order[int(pos)], 1, int(ts)))
            )
    return TraceFile(lines=tuple(lines))


@dataclass(frozen=True)
class ReplayReport:
    records_sent: int
    wall_seconds: float


async def replay(
    trace: TraceFile,
    target: str,
    speed: float = 1.0,
    *,
    chunk: int = 256,
) -> ReplayReport:
    """Stream a trace to ``target`` ("host:port"), pacing by event time / speed.

    Raises ConnectionRefusedError when the server is unreachable and
    MalformedTraceError for an invalid trace.
    """
    if speed <= 0:
        raise ValueError("speed must be > 0")
    trace.validate()
    host, port = parse_address(target)
    reader, writer = await asyncio.open_connection(host, port)
    started = time.perf_counter()
    sent = 0
    try:
        writer.write(trace.lines[0].encode("utf-8") + b"\n")
        sent += 1
        pending = 0
        for line in trace.lines[1:]:
            ts = json.loads(line)["timestampMs"]
            due = started + ts / 1000.0 / speed
            now = time.perf_counter()
            if due > now:
                await writer.drain()
                await asyncio.sleep(due - now)
                pending = 0
            writer.write(line.encode("utf-8") + b"\n")
            sent += 1
            pending += 1
            if pending >= chunk:
                await writer.drain()
                pending = 0
        await writer.drain()
    finally:
        writer.close()
        try:
            await writer.wait_closed()
        except (ConnectionError, OSError):
            pass
    return ReplayReport(records_sent=sent, wall_seconds=time.perf_counter() - started)


def parse_address(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not host:
        raise ValueError(f"address must be host:port, got {address!r}")
    return host, int(port)
