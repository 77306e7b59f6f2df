from __future__ import annotations

import random

import pytest

from perfcity.errors import (
    DuplicateClassIdError,
    EmptyModelError,
    NegativeMetricError,
    OrphanClassError,
    SchemaViolationError,
)
from perfcity.model import apply_model_update, class_order, validate_model

from conftest import model_payload, random_model_payload


def test_minimal_model_valid():
    model = validate_model(model_payload([("app.A", "A", ("app",), 3, 2)]))
    assert model.revision == 1
    assert set(model.classes) == {"app.A"}
    assert model.classes["app.A"].num_methods == 3
    assert model.root.children[0].name == "app"
    assert model.root.children[0].classes == ("app.A",)


def test_duplicate_class_id_rejected():
    payload = model_payload(
        [("app.A", "A", ("app",), 1, 1), ("app.A", "A2", ("app",), 2, 2)]
    )
    with pytest.raises(DuplicateClassIdError):
        validate_model(payload)


def test_negative_metric_rejected():
    with pytest.raises(NegativeMetricError):
        validate_model(model_payload([("app.A", "A", ("app",), -1, 0)]))
    with pytest.raises(NegativeMetricError):
        validate_model(model_payload([("app.A", "A", ("app",), 0, -3)]))


def test_empty_model_rejected():
    with pytest.raises(EmptyModelError):
        validate_model({"classes": []})


def test_empty_package_path_is_schema_violation():
    with pytest.raises(SchemaViolationError):
        validate_model(model_payload([("A", "A", (), 1, 1)]))


def test_explicit_tree_cross_checked():
    packages = [{"name": "app", "children": [], "classes": ["app.A", "app.Ghost"]}]
    payload = model_payload([("app.A", "A", ("app",), 1, 1)], packages=packages)
    with pytest.raises(OrphanClassError):
        validate_model(payload)


def test_class_missing_from_tree_is_orphan():
    packages = [{"name": "app", "children": [], "classes": ["app.A"]}]
    payload = model_payload(
        [("app.A", "A", ("app",), 1, 1), ("app.B", "B", ("app",), 1, 1)],
        packages=packages,
    )
    with pytest.raises(OrphanClassError):
        validate_model(payload)


def test_package_path_mismatch_is_orphan():
    packages = [{"name": "app", "children": [], "classes": ["x.A"]}]
    payload = model_payload([("x.A", "A", ("elsewhere",), 1, 1)], packages=packages)
    with pytest.raises(OrphanClassError):
        validate_model(payload)


def test_class_in_two_tree_nodes_rejected():
    packages = [
        {"name": "a", "children": [], "classes": ["a.X"]},
        {"name": "b", "children": [], "classes": ["a.X"]},
    ]
    payload = model_payload([("a.X", "X", ("a",), 1, 1)], packages=packages)
    with pytest.raises(DuplicateClassIdError):
        validate_model(payload)


def test_apply_update_adds_class_and_bumps_revision(tiny_model):
    update = model_payload(
        [
            ("app.A", "A", ("app",), 3, 2),
            ("app.B", "B", ("app",), 1, 0),
            ("app.util.U", "U", ("app", "util"), 5, 4),
            ("app.NewB", "NewB", ("app",), 2, 2),
        ]
    )
    updated = apply_model_update(tiny_model, update)
    assert updated.revision == tiny_model.revision + 1
    assert "app.NewB" in updated.classes
    assert tiny_model.revision == 1  # original untouched


def test_apply_identical_update_still_bumps_revision(tiny_model):
    same = model_payload(
        [
            ("app.A", "A", ("app",), 3, 2),
            ("app.B", "B", ("app",), 1, 0),
            ("app.util.U", "U", ("app", "util"), 5, 4),
        ]
    )
    first = apply_model_update(tiny_model, same)
    second = apply_model_update(first, same)
    assert second.revision == 3
    assert set(second.classes) == set(tiny_model.classes)


def test_failed_update_is_atomic(tiny_model):
    bad = model_payload(
        [("app.A", "A", ("app",), 1, 1), ("app.A", "A", ("app",), 1, 1)]
    )
    with pytest.raises(DuplicateClassIdError):
        apply_model_update(tiny_model, bad)
    assert tiny_model.revision == 1
    assert set(tiny_model.classes) == {"app.A", "app.B", "app.util.U"}


def test_class_removal_via_update(tiny_model):
    update = model_payload([("app.A", "A", ("app",), 3, 2)])
    updated = apply_model_update(tiny_model, update)
    assert set(updated.classes) == {"app.A"}


def test_class_order_lexicographic_dfs():
    model = validate_model(
        model_payload(
            [
                ("a.X", "X", ("a",), 1, 1),
                ("a.Y", "Y", ("a",), 1, 1),
                ("b.Z", "Z", ("b",), 1, 1),
            ]
        )
    )
    assert class_order(model) == ["a.X", "a.Y", "b.Z"]


def test_class_order_single_class():
    model = validate_model(model_payload([("p.Only", "Only", ("p",), 0, 0)]))
    assert class_order(model) == ["p.Only"]


def test_class_order_parent_classes_before_subpackages():
    model = validate_model(
        model_payload(
            [
                ("app.sub.S", "S", ("app", "sub"), 1, 1),
                ("app.M", "M", ("app",), 1, 1),
            ]
        )
    )
    assert class_order(model) == ["app.M", "app.sub.S"]


def test_class_order_invariant_under_input_permutation():
    rng = random.Random(1234)
    payload = random_model_payload(rng, n_classes=40)
    reference = class_order(validate_model(payload))
    assert sorted(reference) == sorted(c["id"] for c in payload["classes"])
    for _ in range(100):
        shuffled = dict(payload)
        shuffled["classes"] = list(payload["classes"])
        rng.shuffle(shuffled["classes"])
        assert class_order(validate_model(shuffled)) == reference


def test_class_order_is_permutation_of_ids():
    rng = random.Random(77)
    for _ in range(20):
        model = validate_model(random_model_payload(rng, rng.randint(1, 60)))
        order = class_order(model)
        assert sorted(order) == sorted(model.classes)
        assert len(set(order)) == len(order)
