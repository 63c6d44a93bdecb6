"""Wide-area network topologies and degree-sequence generators."""

from .generators import (DEFAULT_PROFILE, DegreeProfile, InvalidProfile, NotGraphical,
                         UnrealizableProfile, benchmark_graphs, chung_lu, havel_hakimi,
                         is_graphical, statistics_graph)
from .overlay import Alignment, align_overlay
from .topology import (LinkKind, Media, NodeKind, Topology, WanGraph, WanLink, WanNode,
                       build_radial, build_star, build_statistics, build_wan)

__all__ = [
    "DEFAULT_PROFILE", "DegreeProfile", "InvalidProfile", "NotGraphical", "UnrealizableProfile",
    "benchmark_graphs", "chung_lu", "havel_hakimi", "is_graphical", "statistics_graph",
    "Alignment", "align_overlay",
    "LinkKind", "Media", "NodeKind", "Topology", "WanGraph", "WanLink", "WanNode",
    "build_radial", "build_star", "build_statistics", "build_wan",
]
