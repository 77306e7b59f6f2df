from __future__ import annotations

import random

import pytest

from perfcity.model import validate_model

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call":
            _acceptance_results[name] = "PASS" if report.passed else "FAIL"
        elif report.when == "setup" and report.failed:
            _acceptance_results[name] = "ERROR"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in _acceptance_results.items():
        terminalreporter.write_line(f"[{status}] {name}")


def model_payload(classes, packages=None, revision=None):
    """Raw model-record payload from (id, name, path, methods, attrs) tuples."""
    payload = {
        "classes": [
            {
                "id": cid,
                "name": name,
                "packagePath": list(path),
                "numMethods": methods,
                "numAttributes": attrs,
            }
            for cid, name, path, methods, attrs in classes
        ]
    }
    if packages is not None:
        payload["packages"] = packages
    if revision is not None:
        payload["revision"] = revision
    return payload


def random_model_payload(rng: random.Random, n_classes: int, max_depth: int = 3):
    """Seeded random model: classes scattered over a random package tree."""
    paths = []
    n_paths = max(1, rng.randint(1, max(1, n_classes // 2)))
    for _ in range(n_paths):
        depth = rng.randint(1, max_depth)
        paths.append(tuple(f"p{rng.randint(0, 9)}" for _ in range(depth)))
    classes = []
    for i in range(n_classes):
        path = rng.choice(paths)
        classes.append(
            (
                f"{'.'.join(path)}.C{i}",
                f"C{i}",
                path,
                rng.randint(0, 40),
                rng.randint(0, 25),
            )
        )
    return model_payload(classes)


@pytest.fixture
def tiny_model():
    return validate_model(
        model_payload(
            [
                ("app.A", "A", ("app",), 3, 2),
                ("app.B", "B", ("app",), 1, 0),
                ("app.util.U", "U", ("app", "util"), 5, 4),
            ]
        )
    )
