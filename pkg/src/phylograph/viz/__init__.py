"""Radial layout over inference results, plus persistence."""

from .radial import (
    CycleError,
    LayoutTree,
    layout_forest,
    radial_layout,
    to_forest,
    to_tree,
    wedge_spans,
)
from .plugin import RADIAL, RadialLayoutAlgorithm
from .storage import VisualizationRepository, VisualizationResult

__all__ = [
    "CycleError",
    "LayoutTree",
    "RADIAL",
    "RadialLayoutAlgorithm",
    "VisualizationRepository",
    "VisualizationResult",
    "layout_forest",
    "radial_layout",
    "to_forest",
    "to_tree",
    "wedge_spans",
]
