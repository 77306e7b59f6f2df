"""Offline report rendering: figures plus delimited data for one trace.

Runs the full pipeline (model -> layout, events -> windows -> history)
without a server and writes to an output directory:

* ``city.png``     - top-down city map, buildings colored by the final
                     window's call counts
* ``scatter.png``  - the time x class scatter matrix, red intensity per cell
* ``scatter.csv``  - the same matrix as delimited text, one row per class
* ``buildings.csv``- building geometry and per-class call totals
* ``scene.json``   - the scene document served to live clients
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Rectangle

from .aggregate import window_aggregate
from .harness import TraceFile
from .history import HistoryBuffer, ScatterMatrix, ViewCursor, scatter_matrix
from .layout import (
    CityScene,
    LayoutConfig,
    color_for,
    iter_buildings,
    iter_districts,
    layout_city,
    scene_serialize,
)
from .model import SystemModel, class_order


@dataclass(frozen=True)
class ReportPaths:
    scene_json: Path
    city_png: Path
    scatter_png: Path
    scatter_csv: Path
    buildings_csv: Path


def build_report(
    trace: TraceFile,
    out_dir: str | Path,
    *,
    window_ms: int = 1000,
    history_capacity: int = 300,
    layout_config: LayoutConfig | None = None,
) -> ReportPaths:
    cfg = layout_config or LayoutConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    model = trace.model()
    frames = window_aggregate(trace.events(), window_ms, model)
    history = HistoryBuffer(history_capacity)
    for frame in frames:
        history.push(frame)
    order = class_order(model)
    matrix = scatter_matrix(history, order, ViewCursor())
    scene = layout_city(model, cfg)
    last_counts = frames[-1].counts if frames else {}

    paths = ReportPaths(
        scene_json=out / "scene.json",
        city_png=out / "city.png",
        scatter_png=out / "scatter.png",
        scatter_csv=out / "scatter.csv",
        buildings_csv=out / "buildings.csv",
    )
    paths.scene_json.write_text(scene_serialize(scene), encoding="utf-8")
    _write_scatter_csv(paths.scatter_csv, matrix)
    _write_buildings_csv(paths.buildings_csv, scene, model, matrix)
    _render_city(paths.city_png, scene, last_counts, cfg, window_ms)
    _render_scatter(paths.scatter_png, matrix, model, cfg, window_ms)
    return paths


def _write_scatter_csv(path: Path, matrix: ScatterMatrix) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["classId"] + [f"w{w}" for w in matrix.col_windows])
        for row, class_id in enumerate(matrix.row_ids):
            writer.writerow([class_id] + matrix.values[row].tolist())


def _write_buildings_csv(
    path: Path, scene: CityScene, model: SystemModel, matrix: ScatterMatrix
) -> None:
    totals = {
        class_id: int(matrix.values[row].sum())
        for row, class_id in enumerate(matrix.row_ids)
    }
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["classId", "name", "package", "x", "z", "side", "height", "totalCalls"]
        )
        for b in iter_buildings(scene):
            info = model.classes[b.class_id]
            writer.writerow(
                [
                    b.class_id,
                    info.name,
                    "/".join(info.package_path),
                    f"{b.x:.6f}",
                    f"{b.z:.6f}",
                    f"{b.side:.6f}",
                    f"{b.height:.6f}",
                    totals.get(b.class_id, 0),
                ]
            )


def _render_city(path: Path, scene, counts, cfg: LayoutConfig, window_ms: int) -> None:
    fig, ax = plt.subplots(figsize=(8, 8))
    for district in iter_districts(scene):
        shade = max(0.0, 0.97 - 0.03 * district.depth_level)
        ax.add_patch(
            Rectangle(
                (district.bounds.x, district.bounds.z),
                district.bounds.width,
                district.bounds.depth,
                facecolor=(shade, shade, shade),
                edgecolor="0.55",
                linewidth=0.8,
                zorder=district.depth_level,
            )
        )
        for b in district.buildings:
            rgb = color_for(counts.get(b.class_id, 0), cfg).rgb()
            ax.add_patch(
                Rectangle(
                    (b.x, b.z),
                    b.side,
                    b.side,
                    facecolor=rgb,
                    edgecolor="0.2",
                    linewidth=0.6,
                    zorder=100,
                )
            )
    pad = 0.03 * max(scene.extent.width, scene.extent.depth)
    ax.set_xlim(scene.extent.x - pad, scene.extent.x + scene.extent.width + pad)
    ax.set_ylim(scene.extent.z - pad, scene.extent.z + scene.extent.depth + pad)
    ax.set_aspect("equal")
    ax.invert_yaxis()
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(
        f"city map, revision {scene.model_revision} "
        f"(color: calls in final {window_ms} ms window)"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_scatter(
    path: Path, matrix: ScatterMatrix, model: SystemModel, cfg: LayoutConfig, window_ms: int
) -> None:
    rows = max(len(matrix.row_ids), 1)
    cols = max(len(matrix.col_windows), 1)
    image = np.ones((rows, cols, 3))
    for r in range(matrix.values.shape[0]):
        for c in range(matrix.values.shape[1]):
            count = int(matrix.values[r, c])
            if count > 0:  # zero cells draw no mark
                image[r, c] = color_for(count, cfg).rgb()
    fig_w = min(14.0, max(4.0, cols * 0.12))
    fig_h = min(12.0, max(3.0, rows * 0.16))
    fig, ax = plt.subplots(figsize=(fig_w, fig_h))
    ax.imshow(image, aspect="auto", interpolation="nearest")
    ax.set_xlabel(f"window ({window_ms} ms each)")
    ax.set_ylabel("class")
    if matrix.col_windows:
        step = max(1, cols // 12)
        ax.set_xticks(range(0, cols, step))
        ax.set_xticklabels([str(matrix.col_windows[i]) for i in range(0, cols, step)])
    if len(matrix.row_ids) <= 40:
        ax.set_yticks(range(rows))
        ax.set_yticklabels(
            [model.classes[cid].name if cid in model.classes else cid for cid in matrix.row_ids],
            fontsize=7,
        )
    else:
        ax.set_yticks([])
    ax.set_title("call-count history (rows: classes, columns: windows)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
