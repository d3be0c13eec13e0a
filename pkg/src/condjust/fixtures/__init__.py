"""Bundled example models, derivations and corpus expectations."""

import json
from importlib.resources import files


def fixture_text(name: str) -> str:
    return files("condjust.fixtures").joinpath(name).read_text()


def fixture_json(name: str):
    return json.loads(fixture_text(name))


def fixture_names() -> list[str]:
    root = files("condjust.fixtures")
    return sorted(
        entry.name for entry in root.iterdir()
        if entry.name.endswith((".json", ".txt")))
