"""Graphs of groups, Bass-Serre trees, transplanted cocycles and exact seminorms."""

from .presentations import GraphOfGroups, NormalForm, load_graph, normal_form

__version__ = "0.1.0"

__all__ = ["GraphOfGroups", "NormalForm", "load_graph", "normal_form", "__version__"]
