"""Static structure of the observed system.

A ``SystemModel`` is the package tree plus a flat id -> ``ClassInfo`` map.
Models are immutable once validated; an update produces a new model with a
bumped revision. ``class_order`` fixes the one deterministic class ordering
used by both the city layout and the scatter-plot rows: a depth-first walk
of the package tree that visits each package's own classes first (sorted by
display name, ties broken by id), then its child packages sorted by name.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from typing import Any

from .errors import (
    DuplicateClassIdError,
    EmptyModelError,
    NegativeMetricError,
    OrphanClassError,
    SchemaViolationError,
)

ROOT_PACKAGE_NAME = ""


@dataclass(frozen=True)
class ClassInfo:
    """One class of the observed system and its two static metrics."""

    id: str
    name: str
    package_path: tuple[str, ...]
    num_methods: int
    num_attributes: int


@dataclass(frozen=True)
class PackageNode:
    """A node of the package tree; ``classes`` holds member class ids."""

    name: str
    children: tuple[PackageNode, ...] = ()
    classes: tuple[str, ...] = ()


@dataclass(frozen=True)
class SystemModel:
    root: PackageNode
    classes: Mapping[str, ClassInfo]
    revision: int = 1


# --- payload parsing (schema level; shared with the wire codec) ---

def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaViolationError(message)


def _is_int(value: Any) -> bool:
    # bool is an int subclass; a swapped-in True/False is a type error here
    return isinstance(value, int) and not isinstance(value, bool)


def class_from_payload(obj: Any) -> ClassInfo:
    """Parse one ``classes`` entry of a model payload into a ClassInfo."""
    _require(isinstance(obj, Mapping), "class entry must be an object")
    for key in ("id", "name", "packagePath", "numMethods", "numAttributes"):
        _require(key in obj, f"class entry missing field {key!r}")
    _require(isinstance(obj["id"], str) and obj["id"], "class id must be a non-empty string")
    _require(isinstance(obj["name"], str), "class name must be a string")
    path = obj["packagePath"]
    _require(
        isinstance(path, Sequence) and not isinstance(path, (str, bytes)),
        "packagePath must be an array",
    )
    _require(len(path) > 0, "packagePath must be non-empty")
    _require(
        all(isinstance(seg, str) and seg for seg in path),
        "packagePath segments must be non-empty strings",
    )
    _require(_is_int(obj["numMethods"]), "numMethods must be an integer")
    _require(_is_int(obj["numAttributes"]), "numAttributes must be an integer")
    return ClassInfo(
        id=obj["id"],
        name=obj["name"],
        package_path=tuple(path),
        num_methods=obj["numMethods"],
        num_attributes=obj["numAttributes"],
    )


def package_from_payload(obj: Any) -> PackageNode:
    """Parse one ``packages`` entry (recursively) into a PackageNode."""
    _require(isinstance(obj, Mapping), "package entry must be an object")
    _require("name" in obj, "package entry missing field 'name'")
    _require(
        isinstance(obj["name"], str) and obj["name"],
        "package name must be a non-empty string",
    )
    children_raw = obj.get("children", [])
    classes_raw = obj.get("classes", [])
    _require(
        isinstance(children_raw, Sequence) and not isinstance(children_raw, (str, bytes)),
        "package children must be an array",
    )
    _require(
        isinstance(classes_raw, Sequence) and not isinstance(classes_raw, (str, bytes)),
        "package classes must be an array",
    )
    _require(
        all(isinstance(c, str) and c for c in classes_raw),
        "package classes must be class-id strings",
    )
    return PackageNode(
        name=obj["name"],
        children=tuple(package_from_payload(child) for child in children_raw),
        classes=tuple(classes_raw),
    )


def class_to_payload(cls: ClassInfo) -> dict[str, Any]:
    return {
        "id": cls.id,
        "name": cls.name,
        "packagePath": list(cls.package_path),
        "numMethods": cls.num_methods,
        "numAttributes": cls.num_attributes,
    }


def package_to_payload(node: PackageNode) -> dict[str, Any]:
    return {
        "name": node.name,
        "children": [package_to_payload(child) for child in node.children],
        "classes": list(node.classes),
    }


# --- validation ---

def validate_model(candidate: Any) -> SystemModel:
    """Validate model-shaped data and return a canonical SystemModel.

    ``candidate`` may be a SystemModel, a decoded model record, or a raw
    mapping in the model-record schema. The returned model has its package
    tree canonicalized: children sorted by name, member classes sorted by
    display name (ties by id). Revision defaults to 1 when absent.

    Raises DuplicateClassIdError, OrphanClassError, NegativeMetricError,
    EmptyModelError, or SchemaViolationError.
    """
    revision, packages, classes = _extract_parts(candidate)

    if not classes:
        raise EmptyModelError("model declares zero classes")

    class_map: dict[str, ClassInfo] = {}
    for cls in classes:
        if cls.num_methods < 0 or cls.num_attributes < 0:
            raise NegativeMetricError(
                f"class {cls.id!r} has a negative metric "
                f"(numMethods={cls.num_methods}, numAttributes={cls.num_attributes})"
            )
        if cls.id in class_map:
            raise DuplicateClassIdError(f"class id {cls.id!r} declared more than once")
        class_map[cls.id] = cls

    if packages is None:
        root = _tree_from_paths(class_map)
    else:
        root = PackageNode(name=ROOT_PACKAGE_NAME, children=tuple(packages))
        _check_tree(root, class_map)

    root = _canonicalize(root, class_map)

    if revision is None:
        revision = 1
    elif not _is_int(revision) or revision < 1:
        raise SchemaViolationError("revision must be a positive integer")

    return SystemModel(root=root, classes=class_map, revision=revision)


def _extract_parts(
    candidate: Any,
) -> tuple[Any, Sequence[PackageNode] | None, Sequence[ClassInfo]]:
    if isinstance(candidate, SystemModel):
        return candidate.revision, candidate.root.children, tuple(candidate.classes.values())
    if isinstance(candidate, Mapping):
        classes_raw = candidate.get("classes")
        _require(
            isinstance(classes_raw, Sequence) and not isinstance(classes_raw, (str, bytes)),
            "model payload must carry a 'classes' array",
        )
        classes = tuple(class_from_payload(c) for c in classes_raw)
        packages_raw = candidate.get("packages")
        packages: tuple[PackageNode, ...] | None = None
        if packages_raw is not None:
            _require(
                isinstance(packages_raw, Sequence)
                and not isinstance(packages_raw, (str, bytes)),
                "'packages' must be an array when present",
            )
            packages = tuple(package_from_payload(p) for p in packages_raw)
        return candidate.get("revision"), packages, classes
    # decoded model record (duck-typed to avoid importing the codec here)
    if hasattr(candidate, "classes") and hasattr(candidate, "packages"):
        return (
            getattr(candidate, "revision", None),
            candidate.packages,
            candidate.classes,
        )
    raise SchemaViolationError(f"cannot interpret {type(candidate).__name__} as model data")


def _tree_from_paths(class_map: Mapping[str, ClassInfo]) -> PackageNode:
    """Derive the package tree from the classes' declared package paths."""
    members: dict[tuple[str, ...], list[str]] = {}
    paths: set[tuple[str, ...]] = set()
    for cls in class_map.values():
        paths.update(cls.package_path[:i] for i in range(1, len(cls.package_path) + 1))
        members.setdefault(cls.package_path, []).append(cls.id)

    def build(path: tuple[str, ...]) -> PackageNode:
        child_names = sorted({p[len(path)] for p in paths if len(p) == len(path) + 1 and p[: len(path)] == path})
        return PackageNode(
            name=path[-1] if path else ROOT_PACKAGE_NAME,
            children=tuple(build(path + (name,)) for name in child_names),
            classes=tuple(members.get(path, ())),
        )

    return build(())


def _check_tree(root: PackageNode, class_map: Mapping[str, ClassInfo]) -> None:
    seen: dict[str, tuple[str, ...]] = {}

    def walk(node: PackageNode, path: tuple[str, ...]) -> None:
        names = [child.name for child in node.children]
        if len(names) != len(set(names)):
            raise SchemaViolationError(
                f"duplicate sibling package names under {'/'.join(path) or '<root>'}"
            )
        for class_id in node.classes:
            if class_id in seen:
                raise DuplicateClassIdError(
                    f"class {class_id!r} appears in more than one package node"
                )
            seen[class_id] = path
            if class_id not in class_map:
                raise OrphanClassError(
                    f"class {class_id!r} referenced by the package tree is not declared"
                )
            declared = class_map[class_id].package_path
            if declared != path:
                raise OrphanClassError(
                    f"class {class_id!r} declares packagePath {list(declared)} "
                    f"but sits under {list(path)}"
                )
        for child in node.children:
            walk(child, path + (child.name,))

    walk(root, ())
    missing = set(class_map) - set(seen)
    if missing:
        raise OrphanClassError(
            f"classes declared but absent from the package tree: {sorted(missing)}"
        )


def _canonicalize(root: PackageNode, class_map: Mapping[str, ClassInfo]) -> PackageNode:
    def rebuild(node: PackageNode) -> PackageNode:
        classes = tuple(
            sorted(node.classes, key=lambda cid: (class_map[cid].name, cid))
        )
        children = tuple(
            rebuild(child) for child in sorted(node.children, key=lambda c: c.name)
        )
        return PackageNode(name=node.name, children=children, classes=classes)

    return rebuild(root)


# --- updates and ordering ---

def apply_model_update(model: SystemModel, update: Any) -> SystemModel:
    """Apply a full-snapshot model update, bumping the revision.

    The update is validated on its own content first; on any validation
    error the original model is untouched (the error propagates and no new
    model is produced). Classes absent from the update are removed.
    Consumers must treat a revision change as a full re-layout trigger.
    """
    validated = validate_model(update)
    return replace(validated, revision=model.revision + 1)


def class_order(model: SystemModel) -> list[str]:
    """Deterministic total order of class ids for rows and packing.

    Same model content always yields the same list regardless of the
    serialization order the model arrived in.
    """
    out: list[str] = []

    def walk(node: PackageNode) -> None:
        out.extend(sorted(node.classes, key=lambda cid: (model.classes[cid].name, cid)))
        for child in sorted(node.children, key=lambda c: c.name):
            walk(child)

    walk(model.root)
    return out


def model_to_payload(model: SystemModel) -> dict[str, Any]:
    """Model-record payload (without the ``kind`` tag) for files and wire."""
    order = class_order(model)
    return {
        "revision": model.revision,
        "packages": [package_to_payload(child) for child in model.root.children],
        "classes": [class_to_payload(model.classes[cid]) for cid in order],
    }


def load_model_file(path: Any) -> SystemModel:
    """Read a model file: one UTF-8 document in the model-record schema."""
    import json
    from pathlib import Path

    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaViolationError(f"cannot read model file: {exc}") from exc
    if isinstance(data, Mapping) and data.get("kind") not in (None, "model"):
        raise SchemaViolationError(f"model file has kind {data.get('kind')!r}")
    return validate_model(data)
