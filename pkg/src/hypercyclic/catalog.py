"""The bundled classification catalog."""

from __future__ import annotations

import json
from importlib import resources


def load_catalog() -> list[dict]:
    """Pair specifications with their expected verdicts, as stored."""
    text = resources.files("hypercyclic").joinpath("data/catalog.json").read_text()
    return json.loads(text)


def load_schema(name: str) -> dict:
    text = resources.files("hypercyclic").joinpath(f"schemas/{name}.json").read_text()
    return json.loads(text)
