"""Registry wiring for the algorithms shipped in this package."""

from __future__ import annotations

from phylograph.graphstore import GraphStore
from phylograph.inference import plugin as inference_plugin
from phylograph.viz import plugin as viz_plugin

from .registry import AlgorithmRegistry


def default_registry(store: GraphStore) -> AlgorithmRegistry:
    """A registry holding exactly the built-ins: goeBURST inference and
    the radial layout."""
    registry = AlgorithmRegistry()
    registry.register(inference_plugin.DESCRIPTOR,
                      lambda: inference_plugin.GoeBurstAlgorithm(store))
    registry.register(viz_plugin.DESCRIPTOR,
                      lambda: viz_plugin.RadialLayoutAlgorithm(store))
    return registry
