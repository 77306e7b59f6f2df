"""Headless client for the server's message stream.

Reads the line-delimited client channel into plain dicts; used by the
acceptance suite and handy for scripting against a live server.
"""

from __future__ import annotations

import asyncio
import json
from typing import Any, Callable

from .harness import parse_address

READ_LIMIT = 16 * 1024 * 1024


class StreamClient:
    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self._reader = reader
        self._writer = writer

    @classmethod
    async def connect(cls, address: str) -> "StreamClient":
        host, port = parse_address(address)
        reader, writer = await asyncio.open_connection(host, port, limit=READ_LIMIT)
        return cls(reader, writer)

    async def read(self, timeout: float | None = 5.0) -> dict[str, Any]:
        raw = await asyncio.wait_for(self._reader.readline(), timeout)
        if not raw:
            raise ConnectionError("server closed the stream")
        return json.loads(raw.decode("utf-8"))

    async def read_until(
        self,
        predicate: Callable[[dict[str, Any]], bool],
        timeout: float = 5.0,
    ) -> tuple[list[dict[str, Any]], dict[str, Any]]:
        """Read messages until one satisfies ``predicate``.

        Returns (messages seen before the match, the matching message)."""
        seen: list[dict[str, Any]] = []
        loop = asyncio.get_running_loop()
        deadline = loop.time() + timeout
        while True:
            remaining = deadline - loop.time()
            if remaining <= 0:
                raise asyncio.TimeoutError("predicate not satisfied in time")
            msg = await self.read(timeout=remaining)
            if predicate(msg):
                return seen, msg
            seen.append(msg)

    async def collect(
        self, kind: str, n: int, timeout: float = 10.0
    ) -> list[dict[str, Any]]:
        """Collect the next ``n`` messages of one kind, skipping others."""
        out: list[dict[str, Any]] = []
        loop = asyncio.get_running_loop()
        deadline = loop.time() + timeout
        while len(out) < n:
            remaining = deadline - loop.time()
            if remaining <= 0:
                raise asyncio.TimeoutError(f"got {len(out)}/{n} {kind} messages")
            msg = await self.read(timeout=remaining)
            if msg.get("kind") == kind:
                out.append(msg)
        return out

    async def send(self, obj: dict[str, Any] | str) -> None:
        line = obj if isinstance(obj, str) else json.dumps(obj, sort_keys=True)
        self._writer.write(line.encode("utf-8") + b"\n")
        await self._writer.drain()

    async def control(self, action: str, arg: int | None = None) -> None:
        msg: dict[str, Any] = {"kind": "control", "action": action}
        if arg is not None:
            msg["arg"] = arg
        await self.send(msg)

    async def select(self, class_id: str | None, via: str | None = None) -> None:
        msg: dict[str, Any] = {"kind": "select", "classId": class_id}
        if via is not None:
            msg["via"] = via  # informational only; the server state is shared
        await self.send(msg)

    async def hover(self, class_id: str | None) -> None:
        await self.send({"kind": "hover", "classId": class_id})

    async def close(self) -> None:
        self._writer.close()
        try:
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass
