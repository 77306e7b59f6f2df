"""Wire protocol v1: line-delimited UTF-8 JSON records.

Four record kinds flow over the byte stream:

* ``model``   - full system-model snapshot (profiler -> server)
* ``event``   - batched per-class call count (profiler -> server)
* ``frame``   - closed aggregation window (server -> client)
* ``control`` - pause / resume / seek (client -> server)

``decode_record(encode_record(r))`` is the structural identity on all four
kinds. Decoding never raises anything but ProtocolError subclasses.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

from .errors import MalformedRecordError, SchemaViolationError, UnknownKindError
from .model import (
    ClassInfo,
    PackageNode,
    SystemModel,
    class_from_payload,
    class_to_payload,
    model_to_payload,
    package_from_payload,
    package_to_payload,
)

RECORD_KINDS = ("model", "event", "frame", "control")
CONTROL_ACTIONS = ("pause", "resume", "seek")


@dataclass(frozen=True)
class CallEvent:
    """``count`` method invocations of one class, batched at ``timestamp_ms``."""

    class_id: str
    count: int
    timestamp_ms: int


@dataclass(frozen=True)
class MetricFrame:
    """Per-class call totals for one closed window; zero counts are absent."""

    window_index: int
    window_start_ms: int
    counts: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ControlAction:
    action: str
    arg: int | None = None


@dataclass(frozen=True)
class ModelRecord:
    """Schema-checked but not yet semantically validated model snapshot."""

    classes: tuple[ClassInfo, ...]
    packages: tuple[PackageNode, ...] | None = None
    revision: int | None = None


WireRecord = Union[ModelRecord, CallEvent, MetricFrame, ControlAction]


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _field(payload: Mapping[str, Any], name: str) -> Any:
    if name not in payload:
        raise SchemaViolationError(f"record missing field {name!r}")
    return payload[name]


def _int_field(payload: Mapping[str, Any], name: str, minimum: int | None = None) -> int:
    value = _field(payload, name)
    if not _is_int(value):
        raise SchemaViolationError(f"field {name!r} must be an integer")
    if minimum is not None and value < minimum:
        raise SchemaViolationError(f"field {name!r} must be >= {minimum}")
    return value


def _str_field(payload: Mapping[str, Any], name: str) -> str:
    value = _field(payload, name)
    if not isinstance(value, str) or not value:
        raise SchemaViolationError(f"field {name!r} must be a non-empty string")
    return value


def _decode_event(payload: Mapping[str, Any]) -> CallEvent:
    return CallEvent(
        class_id=_str_field(payload, "classId"),
        count=_int_field(payload, "count", minimum=1),
        timestamp_ms=_int_field(payload, "timestampMs", minimum=0),
    )


def _decode_frame(payload: Mapping[str, Any]) -> MetricFrame:
    counts_raw = _field(payload, "counts")
    if not isinstance(counts_raw, Mapping):
        raise SchemaViolationError("field 'counts' must be an object")
    counts: dict[str, int] = {}
    for key, value in counts_raw.items():
        if not isinstance(key, str) or not key:
            raise SchemaViolationError("counts keys must be class-id strings")
        if not _is_int(value) or value < 1:
            raise SchemaViolationError(
                "counts values must be positive integers (zero entries are omitted)"
            )
        counts[key] = value
    return MetricFrame(
        window_index=_int_field(payload, "windowIndex", minimum=0),
        window_start_ms=_int_field(payload, "windowStartMs", minimum=0),
        counts=counts,
    )


def _decode_control(payload: Mapping[str, Any]) -> ControlAction:
    action = _str_field(payload, "action")
    if action not in CONTROL_ACTIONS:
        raise SchemaViolationError(f"unknown control action {action!r}")
    arg = payload.get("arg")
    if action == "seek":
        if not _is_int(arg):
            raise SchemaViolationError("seek requires an integer 'arg'")
    elif arg is not None:
        raise SchemaViolationError(f"control {action!r} takes no 'arg'")
    return ControlAction(action=action, arg=arg)


def _decode_model(payload: Mapping[str, Any]) -> ModelRecord:
    classes_raw = _field(payload, "classes")
    if not isinstance(classes_raw, Sequence) or isinstance(classes_raw, (str, bytes)):
        raise SchemaViolationError("field 'classes' must be an array")
    classes = tuple(class_from_payload(c) for c in classes_raw)
    packages_raw = payload.get("packages")
    packages: tuple[PackageNode, ...] | None = None
    if packages_raw is not None:
        if not isinstance(packages_raw, Sequence) or isinstance(packages_raw, (str, bytes)):
            raise SchemaViolationError("field 'packages' must be an array")
        packages = tuple(package_from_payload(p) for p in packages_raw)
    revision = payload.get("revision")
    if revision is not None and (not _is_int(revision) or revision < 1):
        raise SchemaViolationError("field 'revision' must be a positive integer")
    return ModelRecord(classes=classes, packages=packages, revision=revision)


_DECODERS = {
    "event": _decode_event,
    "frame": _decode_frame,
    "control": _decode_control,
    "model": _decode_model,
}


def decode_record(line: str) -> WireRecord:
    """Decode one protocol line into a typed record.

    Raises MalformedRecordError for non-JSON / non-object input,
    UnknownKindError for an unrecognized kind, and SchemaViolationError for
    a known kind with missing or ill-typed payload fields.
    """
    try:
        payload = json.loads(line)
    except (json.JSONDecodeError, TypeError, RecursionError) as exc:
        raise MalformedRecordError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedRecordError("record must be a JSON object")
    kind = payload.get("kind")
    if not isinstance(kind, str):
        raise MalformedRecordError("record has no 'kind' string")
    if kind not in RECORD_KINDS:
        raise UnknownKindError(f"unknown record kind {kind!r}")
    return _DECODERS[kind](payload)


def encode_record(record: WireRecord) -> str:
    """Encode a record as a single JSON line (no trailing newline)."""
    if isinstance(record, CallEvent):
        payload: dict[str, Any] = {
            "kind": "event",
            "classId": record.class_id,
            "count": record.count,
            "timestampMs": record.timestamp_ms,
        }
    elif isinstance(record, MetricFrame):
        payload = {
            "kind": "frame",
            "windowIndex": record.window_index,
            "windowStartMs": record.window_start_ms,
            "counts": dict(record.counts),
        }
    elif isinstance(record, ControlAction):
        payload = {"kind": "control", "action": record.action}
        if record.arg is not None:
            payload["arg"] = record.arg
    elif isinstance(record, ModelRecord):
        payload = {"kind": "model", "classes": [class_to_payload(c) for c in record.classes]}
        if record.packages is not None:
            payload["packages"] = [package_to_payload(p) for p in record.packages]
        if record.revision is not None:
            payload["revision"] = record.revision
    else:
        raise TypeError(f"not a wire record: {type(record).__name__}")
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def model_record(model: SystemModel) -> ModelRecord:
    """The wire form of a validated SystemModel."""
    payload = model_to_payload(model)
    return ModelRecord(
        classes=tuple(model.classes[c["id"]] for c in payload["classes"]),
        packages=tuple(model.root.children),
        revision=model.revision,
    )


def encode_model(model: SystemModel) -> str:
    return encode_record(model_record(model))
