"""The long-running server tying the pipeline together.

One process owns the model, the laid-out scene, the aggregator and the
frame history. Profilers (or the replay harness) connect to the ingest
address and stream wire-protocol lines; UI clients connect to the client
address and receive, in order: the scene document, the class order, every
buffered frame (backfill), then live frames. Model updates push a fresh
scene before any frame computed against the new revision.

Everything runs on one asyncio loop: the aggregator is the single logical
writer, history snapshots and scene documents are immutable values, and
per-session state (cursor, selection) is touched only by that session's
handler. Client messages reuse wire-record schemas for frames and
controls; selection and hover ride dedicated record kinds.
"""

from __future__ import annotations

import asyncio
import contextlib
import itertools
import json
import signal
import time
from dataclasses import dataclass, field, replace
from typing import Any

try:
    import websockets
except ImportError:  # optional [ws] extra; TCP clients are unaffected
    websockets = None  # type: ignore[assignment]

from .aggregate import WindowAggregator
from .errors import (
    BindFailureError,
    ModelError,
    ProtocolError,
    SeekOutOfRangeError,
    ServiceError,
    UnknownClassError,
)
from .harness import parse_address
from .history import HistoryBuffer, ViewCursor, set_cursor, visible_position
from .layout import LayoutConfig, layout_city, scene_serialize
from .model import SystemModel, apply_model_update, class_order, validate_model
from .protocol import CallEvent, MetricFrame, ModelRecord, decode_record, encode_record

READ_LIMIT = 16 * 1024 * 1024  # model records for large systems exceed 64 KiB
AWAITING_MODEL = "awaiting model"


@dataclass(frozen=True)
class SelectionState:
    """The one shared highlight, applied to building and mark alike."""

    selected: str | None = None
    hover: str | None = None


@dataclass
class Session:
    session_id: int
    queue: asyncio.Queue
    cursor: ViewCursor = field(default_factory=ViewCursor)
    selection: SelectionState = field(default_factory=SelectionState)


@dataclass(frozen=True)
class ServerConfig:
    ingest_address: str = "127.0.0.1:7071"
    client_address: str = "127.0.0.1:7072"
    window_ms: int = 1000
    history_capacity: int = 300
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    ws_address: str | None = None

    def validate(self) -> None:
        if self.window_ms < 1:
            raise ValueError("window_ms must be >= 1")
        if self.history_capacity < 1:
            raise ValueError("history_capacity must be >= 1")
        addresses = [self.ingest_address, self.client_address]
        if self.ws_address is not None:
            addresses.append(self.ws_address)
        # port 0 is OS-assigned and can never collide
        fixed = [a for a in addresses if parse_address(a)[1] != 0]
        if len(set(fixed)) != len(fixed):
            raise ValueError("listen addresses must be distinct")


def _msg(kind: str, **fields: Any) -> str:
    return json.dumps({"kind": kind, **fields}, sort_keys=True, separators=(",", ":"))


class PerfCityServer:
    """Ingest listener, aggregator, history and client sessions."""

    def __init__(self, config: ServerConfig):
        config.validate()
        self.config = config
        self.model: SystemModel | None = None
        self.scene_doc: str | None = None
        self.order: list[str] = []
        self.history = HistoryBuffer(config.history_capacity)
        self.aggregator: WindowAggregator | None = None
        self.ingest_errors = 0
        self.dropped_before_model = 0
        self._sessions: dict[int, Session] = {}
        self._session_ids = itertools.count(1)
        self._writer_tasks: dict[int, asyncio.Task] = {}
        self._ingest_server: asyncio.AbstractServer | None = None
        self._client_server: asyncio.AbstractServer | None = None
        self._ws_server = None
        self._tick_task: asyncio.Task | None = None
        self._last_close_wall = time.monotonic()

    # --- lifecycle ---

    async def start(self) -> None:
        ingest_host, ingest_port = parse_address(self.config.ingest_address)
        client_host, client_port = parse_address(self.config.client_address)
        try:
            self._ingest_server = await asyncio.start_server(
                self._handle_ingest, ingest_host, ingest_port, limit=READ_LIMIT
            )
            self._client_server = await asyncio.start_server(
                self._handle_client, client_host, client_port, limit=READ_LIMIT
            )
            if self.config.ws_address is not None:
                if websockets is None:
                    raise ServiceError(
                        "WebSocket listener requested but the 'websockets' package "
                        "is not installed (pip install perfcity[ws])"
                    )
                ws_host, ws_port = parse_address(self.config.ws_address)
                self._ws_server = await websockets.serve(self._handle_ws, ws_host, ws_port)
        except OSError as exc:
            await self.stop()
            raise BindFailureError(f"cannot bind listener: {exc}") from exc
        self._tick_task = asyncio.create_task(self._tick_loop())

    @property
    def ingest_port(self) -> int:
        return self._ingest_server.sockets[0].getsockname()[1]

    @property
    def client_port(self) -> int:
        return self._client_server.sockets[0].getsockname()[1]

    async def stop(self) -> None:
        """Flush the partial window as a final frame, then shut down."""
        if self._tick_task is not None:
            self._tick_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._tick_task
            self._tick_task = None
        if self.aggregator is not None:
            self._emit_frame(self.aggregator.flush())
        for server in (self._ingest_server, self._client_server):
            if server is not None:
                server.close()
                await server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
        for session in list(self._sessions.values()):
            session.queue.put_nowait(None)
        pending = [t for t in self._writer_tasks.values() if not t.done()]
        if pending:
            done, not_done = await asyncio.wait(pending, timeout=2.0)
            for task in not_done:
                task.cancel()

    # --- ingest side ---

    async def _handle_ingest(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                line = raw.decode("utf-8", errors="replace").strip()
                if not line:
                    continue
                self._ingest_line(line)
        except (ConnectionError, asyncio.LimitOverrunError):
            pass
        finally:
            writer.close()
            with contextlib.suppress(ConnectionError, OSError):
                await writer.wait_closed()

    def _ingest_line(self, line: str) -> None:
        try:
            record = decode_record(line)
        except ProtocolError:
            self.ingest_errors += 1
            return
        if isinstance(record, ModelRecord):
            try:
                self.apply_model(record)
            except (ModelError, ProtocolError):
                self.ingest_errors += 1  # failed update is atomic
        elif isinstance(record, CallEvent):
            if self.aggregator is None:
                self.dropped_before_model += 1
                return
            for frame in self.aggregator.add_event(record):
                self._emit_frame(frame)
        # frame/control records on the ingest channel are ignored

    def apply_model(self, candidate) -> None:
        """Install or update the model: validate, re-layout, notify clients."""
        if self.model is None:
            model = validate_model(candidate)
        else:
            model = apply_model_update(self.model, candidate)
        self.model = model
        self.order = class_order(model)
        scene = layout_city(model, self.config.layout)
        self.scene_doc = scene_serialize(scene)
        if self.aggregator is None:
            self.aggregator = WindowAggregator(self.config.window_ms, model)
            self._last_close_wall = time.monotonic()
        else:
            self.aggregator.set_model(model)
        scene_line = self._scene_line()
        order_line = _msg("order", classIds=self.order)
        for session in self._sessions.values():
            session.queue.put_nowait(scene_line)
            session.queue.put_nowait(order_line)
            self._drop_dangling_refs(session)

    def _drop_dangling_refs(self, session: Session) -> None:
        assert self.model is not None
        sel = session.selection
        if sel.selected is not None and sel.selected not in self.model.classes:
            session.selection = replace(sel, selected=None)
            session.queue.put_nowait(_msg("selection", selected=None))
        sel = session.selection
        if sel.hover is not None and sel.hover not in self.model.classes:
            session.selection = replace(sel, hover=None)
            session.queue.put_nowait(_msg("hover", classId=None, name=None))

    def _emit_frame(self, frame: MetricFrame) -> None:
        self.history.push(frame)
        self._last_close_wall = time.monotonic()
        line = encode_record(frame)
        for session in self._sessions.values():
            session.queue.put_nowait(line)

    async def _tick_loop(self) -> None:
        # Live windows close on the next-stamped event; this loop closes
        # them after 2x window_ms of wall silence so idle systems still
        # produce (empty) frames.
        interval = min(max(self.config.window_ms / 4000.0, 0.01), 0.5)
        timeout = 2.0 * self.config.window_ms / 1000.0
        while True:
            await asyncio.sleep(interval)
            if self.aggregator is None:
                continue
            if time.monotonic() - self._last_close_wall >= timeout:
                boundary = self.aggregator.current_window_start_ms + self.config.window_ms
                for frame in self.aggregator.advance_to(boundary):
                    self._emit_frame(frame)

    # --- client side ---

    def _scene_line(self) -> str:
        # color parameters ride along so clients map counts to the same ramp
        assert self.scene_doc is not None
        return _msg(
            "scene",
            scene=json.loads(self.scene_doc),
            colorRef=self.config.layout.color_ref,
            colorScale=self.config.layout.color_scale,
        )

    def _subscribe(self, session: Session) -> None:
        """Queue the initial bundle and register for live delivery.

        Runs synchronously on the event loop, so no frame can slip between
        the history snapshot and the registration.
        """
        if self.scene_doc is None:
            session.queue.put_nowait(_msg("notice", message=AWAITING_MODEL))
        else:
            session.queue.put_nowait(self._scene_line())
            session.queue.put_nowait(_msg("order", classIds=self.order))
            for frame in self.history.snapshot():
                session.queue.put_nowait(encode_record(frame))
        self._sessions[session.session_id] = session

    def _unsubscribe(self, session: Session) -> None:
        self._sessions.pop(session.session_id, None)
        session.queue.put_nowait(None)

    async def _handle_client(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        session = Session(session_id=next(self._session_ids), queue=asyncio.Queue())
        self._subscribe(session)
        self._writer_tasks[session.session_id] = asyncio.create_task(
            self._drain_tcp(session, writer)
        )
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                self._handle_client_line(session, raw.decode("utf-8", errors="replace").strip())
        except (ConnectionError, asyncio.LimitOverrunError):
            pass
        finally:
            self._unsubscribe(session)
            task = self._writer_tasks.pop(session.session_id, None)
            if task is not None:
                with contextlib.suppress(asyncio.CancelledError):
                    await task

    async def _drain_tcp(self, session: Session, writer: asyncio.StreamWriter) -> None:
        try:
            while True:
                line = await session.queue.get()
                if line is None:
                    break
                writer.write(line.encode("utf-8") + b"\n")
                await writer.drain()
        except (ConnectionError, OSError):
            pass
        finally:
            writer.close()
            with contextlib.suppress(ConnectionError, OSError):
                await writer.wait_closed()

    async def _handle_ws(self, websocket) -> None:
        session = Session(session_id=next(self._session_ids), queue=asyncio.Queue())
        self._subscribe(session)
        self._writer_tasks[session.session_id] = asyncio.create_task(
            self._drain_ws(session, websocket)
        )
        try:
            async for message in websocket:
                if isinstance(message, bytes):
                    message = message.decode("utf-8", errors="replace")
                self._handle_client_line(session, message.strip())
        except Exception:
            pass
        finally:
            self._unsubscribe(session)
            task = self._writer_tasks.pop(session.session_id, None)
            if task is not None:
                with contextlib.suppress(asyncio.CancelledError):
                    await task

    async def _drain_ws(self, session: Session, websocket) -> None:
        try:
            while True:
                line = await session.queue.get()
                if line is None:
                    break
                await websocket.send(line)
        except Exception:
            pass
        finally:
            with contextlib.suppress(Exception):
                await websocket.close()

    def _handle_client_line(self, session: Session, line: str) -> None:
        if not line:
            return
        try:
            obj = json.loads(line)
            kind = obj.get("kind") if isinstance(obj, dict) else None
        except json.JSONDecodeError:
            session.queue.put_nowait(_msg("error", error="MalformedRecord"))
            return
        if kind == "control":
            self._on_control(session, line)
        elif kind == "select":
            self._on_select(session, obj.get("classId"))
        elif kind == "hover":
            self._on_hover(session, obj.get("classId"))
        else:
            session.queue.put_nowait(_msg("error", error="UnknownKind", detail=str(kind)))

    def _on_control(self, session: Session, line: str) -> None:
        try:
            record = decode_record(line)
            session.cursor = set_cursor(
                session.cursor, record.action, self.history, record.arg
            )
        except SeekOutOfRangeError as exc:
            session.queue.put_nowait(_msg("error", error="SeekOutOfRange", detail=str(exc)))
            return
        except ProtocolError as exc:
            session.queue.put_nowait(_msg("error", error="SchemaViolation", detail=str(exc)))
            return
        session.queue.put_nowait(
            _msg(
                "cursor",
                mode=session.cursor.mode,
                position=visible_position(session.cursor, self.history),
            )
        )

    def _on_select(self, session: Session, target: Any) -> None:
        try:
            state = self.apply_select(session, target)
        except UnknownClassError as exc:
            session.queue.put_nowait(_msg("error", error="UnknownClass", detail=str(exc)))
            return
        session.queue.put_nowait(_msg("selection", selected=state.selected))

    def _on_hover(self, session: Session, target: Any) -> None:
        try:
            state, name = self.apply_hover(session, target)
        except UnknownClassError as exc:
            session.queue.put_nowait(_msg("error", error="UnknownClass", detail=str(exc)))
            return
        session.queue.put_nowait(_msg("hover", classId=state.hover, name=name))

    # --- selection / hover (view-agnostic by construction) ---

    def apply_select(self, session: Session, target: str | None) -> SelectionState:
        """Update the session's shared selection state.

        The state names one classId highlighted in BOTH views; selecting
        via the city or via the scatter produces the identical state.
        """
        self._check_target(target)
        session.selection = replace(session.selection, selected=target)
        return session.selection

    def apply_hover(self, session: Session, target: str | None) -> tuple[SelectionState, str | None]:
        self._check_target(target)
        session.selection = replace(session.selection, hover=target)
        name = None
        if target is not None:
            assert self.model is not None
            name = self.model.classes[target].name
        return session.selection, name

    def _check_target(self, target: Any) -> None:
        if target is None:
            return
        if not isinstance(target, str) or self.model is None or target not in self.model.classes:
            raise UnknownClassError(f"no class {target!r} in the current model")


async def run_server(config: ServerConfig) -> None:
    """Run until SIGINT/SIGTERM; shutdown flushes the partial window."""
    server = PerfCityServer(config)
    await server.start()
    stop_event = asyncio.Event()
    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        loop.add_signal_handler(sig, stop_event.set)
    try:
        await stop_event.wait()
    finally:
        await server.stop()
