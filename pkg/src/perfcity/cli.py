"""Command-line entry points.

``perfcity serve`` runs the server, ``perfcity report`` renders figures and
delimited data from a trace. ``perfcity-harness gen`` / ``replay`` generate
and stream synthetic workloads. Flags override ``PERFCITY_*`` environment
variables, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys

from .errors import PerfCityError
from .harness import TraceFile, generate_workload, load_workload_spec, replay
from .layout import LayoutConfig
from .service import PerfCityServer, ServerConfig


def _env(name: str, default, cast=str):
    raw = os.environ.get(f"PERFCITY_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"PERFCITY_{name}={raw!r} is not a valid {cast.__name__}")


def _add_layout_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scale",
        type=float,
        default=_env("SCALE", 1.0, float),
        help="world extent of the normalized city (default 1.0)",
    )
    parser.add_argument(
        "--color-ref",
        type=int,
        default=_env("COLOR_REF", 1000, int),
        help="calls per window mapped to full red intensity (default 1000)",
    )
    parser.add_argument(
        "--color-scale",
        choices=("linear", "log"),
        default=_env("COLOR_SCALE", "log"),
        help="intensity ramp (default log; call counts are heavy-tailed)",
    )


def _add_window_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--window-ms",
        type=int,
        default=_env("WINDOW_MS", 1000, int),
        help="aggregation window length in ms (default 1000)",
    )
    parser.add_argument(
        "--history",
        type=int,
        default=_env("HISTORY", 300, int),
        help="history buffer capacity in frames (default 300)",
    )


def _layout_config(args: argparse.Namespace) -> LayoutConfig:
    return LayoutConfig(
        scale=args.scale, color_ref=args.color_ref, color_scale=args.color_scale
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="perfcity",
        description="Live call-count observability as a metric-encoded 3D city.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the ingest/aggregation/client server")
    serve.add_argument(
        "--ingest",
        default=_env("INGEST", "127.0.0.1:7071"),
        help="profiler/harness listen address (default 127.0.0.1:7071)",
    )
    serve.add_argument(
        "--serve",
        dest="client_address",
        default=_env("SERVE", "127.0.0.1:7072"),
        help="UI client listen address (default 127.0.0.1:7072)",
    )
    serve.add_argument(
        "--serve-ws",
        dest="ws_address",
        default=_env("SERVE_WS", None),
        help="optional WebSocket mirror of the client channel (host:port)",
    )
    serve.add_argument(
        "--model",
        default=_env("MODEL", None),
        help="model file to load at startup (model-record schema)",
    )
    _add_window_flags(serve)
    _add_layout_flags(serve)

    report = sub.add_parser("report", help="render figures + delimited data from a trace")
    report.add_argument("--trace", required=True, help="trace file to analyze")
    report.add_argument("--out", required=True, help="output directory")
    _add_window_flags(report)
    _add_layout_flags(report)

    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _run_serve(args)
        if args.command == "report":
            return _run_report(args)
    except PerfCityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130
    return 0


def _run_serve(args: argparse.Namespace) -> int:
    config = ServerConfig(
        ingest_address=args.ingest,
        client_address=args.client_address,
        window_ms=args.window_ms,
        history_capacity=args.history,
        layout=_layout_config(args),
        ws_address=args.ws_address,
    )

    async def serve() -> None:
        import signal

        server = PerfCityServer(config)
        await server.start()
        if args.model:
            from .model import load_model_file

            server.apply_model(load_model_file(args.model))
            print(f"loaded model from {args.model}")
        print(f"ingest listening on {config.ingest_address} (port {server.ingest_port})")
        print(f"clients listening on {config.client_address} (port {server.client_port})")
        if config.ws_address:
            print(f"websocket clients on {config.ws_address}")
        stop_event = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            loop.add_signal_handler(sig, stop_event.set)
        try:
            await stop_event.wait()
        finally:
            await server.stop()

    asyncio.run(serve())
    return 0


def _run_report(args: argparse.Namespace) -> int:
    from .report import build_report

    trace = TraceFile.read(args.trace)
    paths = build_report(
        trace,
        args.out,
        window_ms=args.window_ms,
        history_capacity=args.history,
        layout_config=_layout_config(args),
    )
    for path in (
        paths.city_png,
        paths.scatter_png,
        paths.scatter_csv,
        paths.buildings_csv,
        paths.scene_json,
    ):
        print(f"wrote {path}")
    return 0


def harness_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="perfcity-harness",
        description="Generate and replay synthetic call-event workloads.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a trace from a workload spec")
    gen.add_argument("--spec", required=True, help="workload spec JSON file")
    gen.add_argument("--out", required=True, help="trace file to write")

    rep = sub.add_parser("replay", help="stream a trace to a running server")
    rep.add_argument("--trace", required=True, help="trace file to send")
    rep.add_argument(
        "--target",
        default=_env("INGEST", "127.0.0.1:7071"),
        help="server ingest address (default 127.0.0.1:7071)",
    )
    rep.add_argument(
        "--speed", type=float, default=1.0, help="time compression factor (default 1.0)"
    )

    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            spec = load_workload_spec(args.spec)
            trace = generate_workload(spec)
            trace.write(args.out)
            print(f"wrote {len(trace.lines)} records to {args.out}")
            return 0
        if args.command == "replay":
            trace = TraceFile.read(args.trace)
            report = asyncio.run(replay(trace, args.target, args.speed))
            print(
                f"sent {report.records_sent} records in {report.wall_seconds:.2f}s "
                f"(speed x{args.speed})"
            )
            return 0
    except PerfCityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConnectionRefusedError:
        print(f"error: connection refused by {args.target}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(main())
