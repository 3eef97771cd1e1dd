"""Bundled example models.

``fig1``/``fig2`` are the two-component reference automata (communicating
and non-communicating), ``*_dominant`` reweight one transition so that the
first component dominates, ``tmix`` joins two components with equal beta
and different gamma, ``periodic_pair`` is a deliberately periodic
alternating a/b two-cycle and ``even_pair`` has a primitive matrix but
only even a-counts on closed walks (d = 2).
"""
from __future__ import annotations

from importlib import resources

from .model import LinearRepresentation, ValidatedModel, parse_model, validate


def names() -> list[str]:
    files = resources.files(__package__).joinpath("data")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def path(name: str):
    return resources.files(__package__).joinpath("data", f"{name}.json")


def text(name: str) -> str:
    if name not in names():
        raise KeyError(f"unknown corpus model {name!r}; available: {', '.join(names())}")
    return path(name).read_text(encoding="utf-8")


def representation(name: str) -> LinearRepresentation:
    return parse_model(text(name))


def load(name: str) -> ValidatedModel:
    return validate(representation(name))
