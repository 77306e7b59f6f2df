"""Deterministic city geometry and the call-count color encoding.

Each class becomes a square-footprint building: height scales with its
method count, footprint area with its attribute count, color with the live
call count of the current window. Buildings sit inside nested rectangular
districts mirroring the package tree.

Packing is a deterministic shelf layout, computed bottom-up per package:
items (the package's buildings in class order, then child districts by
name) are placed left-to-right into rows whose target width is the square
root of the total item area, which keeps districts roughly square. Pure
area-tiling treemaps cannot guarantee that a fixed square footprint fits
its cell, so rows it is; the visible contract (grouped, non-overlapping,
margin-separated, deterministic) is the same.

The finished city is normalized so its larger ground extent equals
``config.scale`` world units; ``CityScene.unit_scale`` records the factor
applied so layout-unit quantities (margins, pads) can be mapped to world
units.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from .errors import MalformedSceneError
from .model import ClassInfo, PackageNode, SystemModel

LINEAR = "linear"
LOG = "log"

IDLE_RGB = (0.72, 0.72, 0.72)
HOT_RGB = (0.90, 0.05, 0.05)


@dataclass(frozen=True)
class LayoutConfig:
    """Free parameters of the metric encodings and the packing."""

    unit_height: float = 1.0      # world units per method
    min_height: float = 0.1
    unit_area: float = 1.0        # world area units per attribute
    min_side: float = 0.4
    margin: float = 0.25          # gap between sibling footprints/bounds
    district_pad: float = 0.5     # border inside each district
    color_ref: int = 1000         # calls per window mapped to full intensity
    color_scale: str = LOG
    scale: float = 1.0            # world extent of the normalized city

    def __post_init__(self) -> None:
        for name in ("unit_height", "min_height", "unit_area", "min_side",
                     "margin", "district_pad", "scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.color_ref < 1:
            raise ValueError("color_ref must be >= 1")
        if self.color_scale not in (LINEAR, LOG):
            raise ValueError(f"color_scale must be '{LINEAR}' or '{LOG}'")


@dataclass(frozen=True)
class Rect:
    x: float
    z: float
    width: float
    depth: float


@dataclass(frozen=True)
class Building:
    class_id: str
    x: float
    z: float
    side: float
    height: float


@dataclass(frozen=True)
class District:
    package_path: tuple[str, ...]
    bounds: Rect
    children: tuple[District, ...]
    buildings: tuple[Building, ...]
    depth_level: int


@dataclass(frozen=True)
class CityScene:
    root: District
    model_revision: int
    extent: Rect
    unit_scale: float


@dataclass(frozen=True)
class ColorValue:
    """Call-count intensity in [0, 1]; 0 is idle gray, 1 the hottest red."""

    intensity: float

    def rgb(self) -> tuple[float, float, float]:
        t = self.intensity
        return tuple(g + (h - g) * t for g, h in zip(IDLE_RGB, HOT_RGB))  # type: ignore[return-value]


def building_dimensions(cls: ClassInfo, cfg: LayoutConfig) -> tuple[float, float]:
    """(height, footprint side) for one class, clamped at the config floors."""
    height = max(cfg.min_height, cfg.unit_height * cls.num_methods)
    side = max(cfg.min_side, math.sqrt(cfg.unit_area * cls.num_attributes))
    return height, side


def color_for(count: int, cfg: LayoutConfig) -> ColorValue:
    """Color intensity for a per-window call count.

    Zero calls map to exactly 0 (neutral gray); ``count >= color_ref``
    saturates at 1. Non-decreasing in ``count`` under both scales.
    """
    if count <= 0:
        return ColorValue(0.0)
    if cfg.color_scale == LINEAR:
        return ColorValue(min(1.0, count / cfg.color_ref))
    return ColorValue(min(1.0, math.log1p(count) / math.log1p(cfg.color_ref)))


# --- packing ---

def layout_city(model: SystemModel, cfg: LayoutConfig) -> CityScene:
    """Lay out the whole model; a pure function of (model content, config)."""
    root = _layout_node(model.root, model, cfg, path=(), depth=0)
    span = max(root.bounds.width, root.bounds.depth)
    factor = cfg.scale / span
    root = _scale_district(root, factor)
    return CityScene(
        root=root,
        model_revision=model.revision,
        extent=root.bounds,
        unit_scale=factor,
    )


def _layout_node(
    node: PackageNode,
    model: SystemModel,
    cfg: LayoutConfig,
    path: tuple[str, ...],
    depth: int,
) -> District:
    """Lay out one package in local coordinates (bounds anchored at 0,0)."""
    class_ids = sorted(node.classes, key=lambda cid: (model.classes[cid].name, cid))
    children = sorted(node.children, key=lambda c: c.name)

    items: list[tuple[float, float, Any]] = []
    for cid in class_ids:
        height, side = building_dimensions(model.classes[cid], cfg)
        items.append((side, side, Building(cid, 0.0, 0.0, side, height)))
    for child in children:
        district = _layout_node(child, model, cfg, path + (child.name,), depth + 1)
        items.append((district.bounds.width, district.bounds.depth, district))

    placed_buildings: list[Building] = []
    placed_children: list[District] = []
    pad, margin = cfg.district_pad, cfg.margin

    if items:
        gross_area = sum((w + margin) * (d + margin) for w, d, _ in items)
        target = max(math.sqrt(gross_area), max(w for w, _, _ in items) + margin)
        x = z = row_depth = content_w = 0.0
        for w, d, payload in items:
            if x > 0 and x + w > target:
                z += row_depth + margin
                x = row_depth = 0.0
            if isinstance(payload, Building):
                placed_buildings.append(
                    Building(payload.class_id, pad + x, pad + z, payload.side, payload.height)
                )
            else:
                placed_children.append(_translate_district(payload, pad + x, pad + z))
            content_w = max(content_w, x + w)
            row_depth = max(row_depth, d)
            x += w + margin
        content_d = z + row_depth
    else:
        content_w = content_d = 0.0

    bounds = Rect(0.0, 0.0, content_w + 2 * pad, content_d + 2 * pad)
    return District(
        package_path=path,
        bounds=bounds,
        children=tuple(placed_children),
        buildings=tuple(placed_buildings),
        depth_level=depth,
    )


def _translate_district(d: District, dx: float, dz: float) -> District:
    return District(
        package_path=d.package_path,
        bounds=Rect(d.bounds.x + dx, d.bounds.z + dz, d.bounds.width, d.bounds.depth),
        children=tuple(_translate_district(c, dx, dz) for c in d.children),
        buildings=tuple(
            Building(b.class_id, b.x + dx, b.z + dz, b.side, b.height)
            for b in d.buildings
        ),
        depth_level=d.depth_level,
    )


def _scale_district(d: District, f: float) -> District:
    return District(
        package_path=d.package_path,
        bounds=Rect(d.bounds.x * f, d.bounds.z * f, d.bounds.width * f, d.bounds.depth * f),
        children=tuple(_scale_district(c, f) for c in d.children),
        buildings=tuple(
            Building(b.class_id, b.x * f, b.z * f, b.side * f, b.height * f)
            for b in d.buildings
        ),
        depth_level=d.depth_level,
    )


def iter_buildings(scene: CityScene):
    """All buildings of the scene, in packing order."""
    def walk(d: District):
        yield from d.buildings
        for child in d.children:
            yield from walk(child)
    return walk(scene.root)


def iter_districts(scene: CityScene):
    def walk(d: District):
        yield d
        for child in d.children:
            yield from walk(child)
    return walk(scene.root)


# --- scene documents ---

def scene_serialize(scene: CityScene) -> str:
    """Scene document: JSON with nested districts and building records."""
    return json.dumps(
        {
            "modelRevision": scene.model_revision,
            "unitScale": scene.unit_scale,
            "extent": _rect_to_payload(scene.extent),
            "root": _district_to_payload(scene.root),
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def scene_parse(doc: str) -> CityScene:
    try:
        payload = json.loads(doc)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedSceneError(f"invalid scene document: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedSceneError("scene document must be a JSON object")
    try:
        return CityScene(
            root=_district_from_payload(payload["root"]),
            model_revision=_as_int(payload["modelRevision"]),
            extent=_rect_from_payload(payload["extent"]),
            unit_scale=_as_float(payload["unitScale"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSceneError(f"bad scene structure: {exc}") from exc


def _rect_to_payload(r: Rect) -> dict[str, float]:
    return {"x": r.x, "z": r.z, "width": r.width, "depth": r.depth}


def _district_to_payload(d: District) -> dict[str, Any]:
    return {
        "packagePath": list(d.package_path),
        "bounds": _rect_to_payload(d.bounds),
        "depthLevel": d.depth_level,
        "buildings": [
            {"classId": b.class_id, "x": b.x, "z": b.z, "side": b.side, "height": b.height}
            for b in d.buildings
        ],
        "children": [_district_to_payload(c) for c in d.children],
    }


def _as_float(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected number, got {type(value).__name__}")
    return float(value)


def _as_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"expected integer, got {type(value).__name__}")
    return value


def _rect_from_payload(obj: Any) -> Rect:
    if not isinstance(obj, Mapping):
        raise ValueError("rect must be an object")
    return Rect(
        x=_as_float(obj["x"]),
        z=_as_float(obj["z"]),
        width=_as_float(obj["width"]),
        depth=_as_float(obj["depth"]),
    )


def _district_from_payload(obj: Any) -> District:
    if not isinstance(obj, Mapping):
        raise ValueError("district must be an object")
    path = obj["packagePath"]
    if not isinstance(path, list) or not all(isinstance(s, str) for s in path):
        raise ValueError("packagePath must be a string array")
    buildings = []
    for b in obj["buildings"]:
        if not isinstance(b, Mapping):
            raise ValueError("building must be an object")
        class_id = b["classId"]
        if not isinstance(class_id, str) or not class_id:
            raise ValueError("building classId must be a non-empty string")
        buildings.append(
            Building(
                class_id=class_id,
                x=_as_float(b["x"]),
                z=_as_float(b["z"]),
                side=_as_float(b["side"]),
                height=_as_float(b["height"]),
            )
        )
    return District(
        package_path=tuple(path),
        bounds=_rect_from_payload(obj["bounds"]),
        children=tuple(_district_from_payload(c) for c in obj["children"]),
        buildings=tuple(buildings),
        depth_level=_as_int(obj["depthLevel"]),
    )
