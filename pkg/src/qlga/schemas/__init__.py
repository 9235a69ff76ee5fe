"""Versioned JSON schemas for the CLI reports."""

import json
from importlib import resources

NAMES = ("evolve", "timeavg", "mixing_scan", "circuit_verify", "circuit_count", "gate_count")
VERSION = "v1"


def load(name, version=VERSION):
    text = resources.files(__name__).joinpath(f"{name}.{version}.schema.json").read_text()
    return json.loads(text)


def load_all(version=VERSION):
    """All schemas keyed by their ``$id``."""
    return {s["$id"]: s for s in (load(n, version) for n in NAMES)}
