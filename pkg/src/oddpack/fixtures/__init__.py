"""The canned instances I1-I4 as JSON files."""

from __future__ import annotations

from importlib import resources

NAMES = ("I1", "I2", "I3", "I4")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def load(name: str):
    from ..io import parse_instance

    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return parse_instance(path(name).read_text(encoding="utf-8"))
