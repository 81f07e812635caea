"""Bundled example instances (graphs of groups, complexes, gluing data)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .presentations import GraphOfGroups

GRAPHS = ("zz", "trefoil", "bs12")
COMPLEXES = ("circle", "simplex2", "torus7", "uw", "uw_weighted")
GLUINGS = ("segments_glue", "square_glue", "annulus_glue")


def data_text(name: str) -> str:
    if not name.endswith(".json"):
        name += ".json"
    return resources.files("gogtools.data").joinpath(name).read_text(encoding="utf-8")


def data_json(name: str) -> dict:
    return json.loads(data_text(name))


@lru_cache(maxsize=None)
def graph(name: str) -> GraphOfGroups:
    if name not in GRAPHS:
        raise KeyError(f"no bundled graph of groups named {name!r}; choose from {', '.join(GRAPHS)}")
    return GraphOfGroups.loads(data_text(name))


def names() -> list[str]:
    return [*GRAPHS, *COMPLEXES, *GLUINGS]
