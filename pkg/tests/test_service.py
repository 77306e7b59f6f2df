from __future__ import annotations

import asyncio
import time

import pytest

from perfcity.client import StreamClient
from perfcity.errors import BindFailureError, UnknownClassError
from perfcity.harness import WorkloadSpec, generate_workload, replay
from perfcity.model import validate_model
from perfcity.protocol import encode_model, encode_record, CallEvent
from perfcity.service import PerfCityServer, ServerConfig, Session

from conftest import model_payload


def small_model():
    return validate_model(
        model_payload(
            [
                ("app.A", "A", ("app",), 3, 2),
                ("app.B", "B", ("app",), 1, 1),
                ("app.C", "C", ("app",), 2, 4),
            ]
        )
    )


def config(window_ms=100, history=50):
    return ServerConfig(
        ingest_address="127.0.0.1:0",
        client_address="127.0.0.1:0",
        window_ms=window_ms,
        history_capacity=history,
    )


async def started_server(window_ms=100, history=50):
    server = PerfCityServer(config(window_ms, history))
    await server.start()
    return server


async def feed_lines(server, lines):
    reader, writer = await asyncio.open_connection("127.0.0.1", server.ingest_port)
    for line in lines:
        writer.write(line.encode() + b"\n")
    await writer.drain()
    writer.close()
    await writer.wait_closed()
    await asyncio.sleep(0.05)  # let the loop ingest


def run(coro):
    return asyncio.run(coro)


def test_subscribe_before_model_gets_notice():
    async def scenario():
        server = await started_server()
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        msg = await client.read()
        await client.close()
        await server.stop()
        return msg

    msg = run(scenario())
    assert msg["kind"] == "notice"
    assert msg["message"] == "awaiting model"


def test_subscribe_bundle_order_and_backfill():
    async def scenario():
        server = await started_server(window_ms=50)
        model_line = encode_model(small_model())
        events = [
            encode_record(CallEvent("app.A", 2, 10)),
            encode_record(CallEvent("app.B", 1, 60)),
            encode_record(CallEvent("app.A", 1, 140)),
            encode_record(CallEvent("app.C", 4, 260)),  # closes windows 0,1,2
        ]
        await feed_lines(server, [model_line] + events)
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        first = await client.read()
        second = await client.read()
        backfill = await client.collect("frame", 3, timeout=2.0)
        await client.close()
        await server.stop()
        return first, second, backfill

    first, second, backfill = run(scenario())
    assert first["kind"] == "scene"
    assert first["scene"]["modelRevision"] == 1
    assert second["kind"] == "order"
    assert second["classIds"] == ["app.A", "app.B", "app.C"]
    assert [f["windowIndex"] for f in backfill] == [0, 1, 2]
    assert backfill[0]["counts"] == {"app.A": 2}
    assert backfill[1]["counts"] == {"app.B": 1}
    assert backfill[2]["counts"] == {"app.A": 1}


def test_two_clients_receive_identical_frame_sequences():
    async def scenario():
        server = await started_server(window_ms=50)
        await feed_lines(server, [encode_model(small_model())])
        c1 = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        c2 = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        events = [
            encode_record(CallEvent("app.A", i + 1, i * 40)) for i in range(12)
        ]
        await feed_lines(server, events)
        await server.stop()  # flush tail so both streams end identically
        f1 = await c1.collect("frame", 9, timeout=2.0)
        f2 = await c2.collect("frame", 9, timeout=2.0)
        await c1.close()
        await c2.close()
        return f1, f2

    f1, f2 = run(scenario())
    assert f1 == f2
    indexes = [f["windowIndex"] for f in f1]
    assert indexes == sorted(indexes)


def test_model_update_pushes_fresh_scene_and_clears_dangling_selection():
    async def scenario():
        server = await started_server()
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()  # scene
        await client.read()  # order
        await client.select("app.C")
        reply = await client.read()
        # update removes app.C
        update = validate_model(
            model_payload(
                [("app.A", "A", ("app",), 3, 2), ("app.B", "B", ("app",), 1, 1)]
            )
        )
        await feed_lines(server, [encode_model(update)])
        msgs, scene2 = await client.read_until(lambda m: m["kind"] == "scene")
        order2 = await client.read()
        cleared = await client.read()
        await client.close()
        await server.stop()
        return reply, scene2, order2, cleared

    reply, scene2, order2, cleared = run(scenario())
    assert reply == {"kind": "selection", "selected": "app.C"}
    assert scene2["scene"]["modelRevision"] == 2
    assert order2["classIds"] == ["app.A", "app.B"]
    assert cleared == {"kind": "selection", "selected": None}


def test_select_symmetry_and_unknown_class():
    async def scenario():
        server = await started_server()
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()
        await client.select("app.A", via="building")
        via_building = await client.read()
        await client.select("app.A", via="mark")
        via_mark = await client.read()
        await client.select(None)
        cleared = await client.read()
        await client.select("gone.X")
        error = await client.read()
        await client.close()
        await server.stop()
        return via_building, via_mark, cleared, error

    via_building, via_mark, cleared, error = run(scenario())
    assert via_building == via_mark == {"kind": "selection", "selected": "app.A"}
    assert cleared == {"kind": "selection", "selected": None}
    assert error["kind"] == "error" and error["error"] == "UnknownClass"


def test_hover_carries_display_name():
    async def scenario():
        server = await started_server()
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()
        await client.hover("app.A")
        info = await client.read()
        await client.hover(None)
        cleared = await client.read()
        await client.close()
        await server.stop()
        return info, cleared

    info, cleared = run(scenario())
    assert info == {"kind": "hover", "classId": "app.A", "name": "A"}
    assert cleared == {"kind": "hover", "classId": None, "name": None}


def test_cursor_control_and_seek_errors():
    async def scenario():
        server = await started_server(window_ms=50)
        await feed_lines(server, [encode_model(small_model())])
        events = [encode_record(CallEvent("app.A", 1, t)) for t in range(0, 500, 40)]
        await feed_lines(server, events)
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()
        await client.control("pause")
        _, paused = await client.read_until(lambda m: m["kind"] == "cursor")
        await client.control("seek", 3)
        _, sought = await client.read_until(lambda m: m["kind"] == "cursor")
        await client.control("seek", 999)
        _, err = await client.read_until(lambda m: m["kind"] == "error")
        await client.control("resume")
        _, live = await client.read_until(lambda m: m["kind"] == "cursor")
        await client.close()
        await server.stop()
        return paused, sought, err, live

    paused, sought, err, live = run(scenario())
    assert paused["mode"] == "paused"
    assert sought == {"kind": "cursor", "mode": "paused", "position": 3}
    assert err["error"] == "SeekOutOfRange"
    assert live["mode"] == "live"


def test_shutdown_flushes_partial_window():
    async def scenario():
        server = await started_server(window_ms=10_000)
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()
        await feed_lines(server, [encode_record(CallEvent("app.B", 7, 1500))])
        await server.stop()
        frame = (await client.collect("frame", 1, timeout=2.0))[0]
        await client.close()
        return frame

    frame = run(scenario())
    assert frame["windowIndex"] == 0
    assert frame["counts"] == {"app.B": 7}


def test_bind_failure_on_taken_port():
    async def scenario():
        first = await started_server()
        taken = first.ingest_port
        second = PerfCityServer(
            ServerConfig(
                ingest_address=f"127.0.0.1:{taken}",
                client_address="127.0.0.1:0",
            )
        )
        try:
            with pytest.raises(BindFailureError):
                await second.start()
        finally:
            await first.stop()

    run(scenario())


def test_distinct_address_validation():
    with pytest.raises(ValueError):
        ServerConfig(
            ingest_address="127.0.0.1:7000", client_address="127.0.0.1:7000"
        ).validate()


def test_frames_arrive_at_window_rate():
    async def scenario():
        server = await started_server(window_ms=500)
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()

        spec = WorkloadSpec(
            model=small_model(),
            duration_ms=3000,
            seed=21,
            baseline_calls_per_second=40.0,
        )
        trace = generate_workload(spec)
        replay_task = asyncio.create_task(
            replay(trace, f"127.0.0.1:{server.ingest_port}", speed=1.0)
        )
        arrivals = []
        frames = []
        while len(frames) < 5:
            msg = await client.read(timeout=5.0)
            if msg["kind"] == "frame":
                arrivals.append(time.monotonic())
                frames.append(msg)
        await replay_task
        await client.close()
        await server.stop()
        return frames, arrivals

    frames, arrivals = run(scenario())
    assert [f["windowIndex"] for f in frames] == list(range(5))
    gaps = [b - a for a, b in zip(arrivals[1:-1], arrivals[2:])]
    for gap in gaps:  # first gap skipped: subscription vs replay start skew
        assert 0.4 <= gap <= 0.6, gaps


def test_apply_select_direct_api_unknown_class():
    async def scenario():
        server = await started_server()
        await feed_lines(server, [encode_model(small_model())])
        session = Session(session_id=99, queue=asyncio.Queue())
        state = server.apply_select(session, "app.A")
        assert state.selected == "app.A"
        with pytest.raises(UnknownClassError):
            server.apply_select(session, "nope")
        await server.stop()

    run(scenario())


def test_idle_timeout_closes_windows_without_events():
    async def scenario():
        server = await started_server(window_ms=100)
        await feed_lines(server, [encode_model(small_model())])
        client = await StreamClient.connect(f"127.0.0.1:{server.client_port}")
        await client.read()
        await client.read()
        await feed_lines(server, [encode_record(CallEvent("app.A", 1, 10))])
        # 2x window_ms of wall silence forces the open window shut
        frame = (await client.collect("frame", 1, timeout=2.0))[0]
        await client.close()
        await server.stop()
        return frame

    frame = run(scenario())
    assert frame["windowIndex"] == 0
    assert frame["counts"] == {"app.A": 1}


def test_websocket_mirror_carries_same_records():
    websockets = pytest.importorskip("websockets")

    async def scenario():
        server = PerfCityServer(
            ServerConfig(
                ingest_address="127.0.0.1:0",
                client_address="127.0.0.1:0",
                ws_address="127.0.0.1:18744",
                window_ms=100,
            )
        )
        await server.start()
        await feed_lines(server, [encode_model(small_model())])
        async with websockets.connect("ws://127.0.0.1:18744") as ws:
            import json as _json

            scene = _json.loads(await asyncio.wait_for(ws.recv(), 2.0))
            order = _json.loads(await asyncio.wait_for(ws.recv(), 2.0))
            await ws.send(_json.dumps({"kind": "select", "classId": "app.B"}))
            selection = _json.loads(await asyncio.wait_for(ws.recv(), 2.0))
        await server.stop()
        return scene, order, selection

    scene, order, selection = run(scenario())
    assert scene["kind"] == "scene"
    assert order["classIds"] == ["app.A", "app.B", "app.C"]
    assert selection == {"kind": "selection", "selected": "app.B"}


def test_model_file_loading(tmp_path):
    from perfcity.model import load_model_file
    from perfcity.errors import SchemaViolationError

    path = tmp_path / "model.json"
    path.write_text(encode_model(small_model()) + "\n")
    model = load_model_file(path)
    assert set(model.classes) == {"app.A", "app.B", "app.C"}

    bad = tmp_path / "bad.json"
    bad.write_text('{"kind":"event"}')
    with pytest.raises(SchemaViolationError):
        load_model_file(bad)
