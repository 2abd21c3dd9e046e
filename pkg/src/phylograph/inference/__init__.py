"""Distance matrices and the goeBURST spanning tree, plus persistence."""

from .distance import DistanceMatrix, LengthMismatchError, build_matrix, hamming
from .goeburst import (
    DEFAULT_LEVELS,
    Edge,
    VertexRank,
    edge_compare,
    founder,
    goeburst,
    rank_vertices,
)
from .plugin import GOEBURST, GoeBurstAlgorithm
from .storage import DISTANCES, InferenceResult, InferenceResultRepository

__all__ = [
    "DEFAULT_LEVELS",
    "DISTANCES",
    "DistanceMatrix",
    "Edge",
    "GOEBURST",
    "GoeBurstAlgorithm",
    "InferenceResult",
    "InferenceResultRepository",
    "LengthMismatchError",
    "VertexRank",
    "build_matrix",
    "edge_compare",
    "founder",
    "goeburst",
    "hamming",
    "rank_vertices",
]
