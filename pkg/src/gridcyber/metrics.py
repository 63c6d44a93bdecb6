"""Graph metrics over the WAN router graph and count summaries over the model.

Distances are unweighted hop counts from breadth-first search
(``scipy.sparse.csgraph``), processed in source chunks so the largest cases
never hold a full distance matrix.  Disconnected graphs are measured per
connected component: path length and diameter are averaged over components
with at least two nodes and the result is flagged as not connected.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .cyber.model import CyberModel
from .errors import GenerationError
from .wan.topology import NodeKind, WanGraph

GraphLike = Union[WanGraph, nx.Graph]
CHUNK = 512
STAGES = ("generation", "serialization", "metrics")


class EmptyGraph(GenerationError):
    pass


class DegenerateGraph(GenerationError):
    pass


def _edges(graph: GraphLike) -> tuple[int, np.ndarray]:
    """Node count and an ``(m, 2)`` array of edges over ``0..n-1``."""
    if isinstance(graph, WanGraph):
        index = {n.node_id: i for i, n in enumerate(graph.nodes)}
        pairs = [(index[l.endpoint_a], index[l.endpoint_b]) for l in graph.links]
        n = len(graph.nodes)
    else:
        index = {v: i for i, v in enumerate(graph.nodes)}
        pairs = [(index[a], index[b]) for a, b in graph.edges() if a != b]
        n = graph.number_of_nodes()
    return n, np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def _adjacency(n: int, edges: np.ndarray) -> csr_matrix:
    data = np.ones(len(edges), dtype=np.int8)
    a = csr_matrix((data, (edges[:, 0], edges[:, 1])), shape=(n, n))
    return ((a + a.T) > 0).astype(np.int8)


@dataclass(frozen=True)
class PathStats:
    l_ave: float
    diameter: int
    component_diameters: tuple[int, ...]
    mean_diameter: float
    connected: bool
    components: int


def path_stats(graph: GraphLike, literal: bool = False, chunk: int = CHUNK) -> PathStats:
    """Average path length and diameter in one BFS sweep.

    ``literal`` divides each component's pairwise distance sum by its node
    count instead of its pair count.
    """
    n, edges = _edges(graph)
    if n == 0:
        raise EmptyGraph("graph has no nodes")
    adj = _adjacency(n, edges)
    n_comp, comp = connected_components(adj, directed=False)
    sums = np.zeros(n_comp, dtype=np.float64)
    ecc = np.zeros(n_comp, dtype=np.int64)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(n, start + chunk))
        d = shortest_path(adj, directed=False, unweighted=True, indices=rows)
        d[~np.isfinite(d)] = 0
        np.add.at(sums, comp[rows], d.sum(axis=1))
        np.maximum.at(ecc, comp[rows], d.max(axis=1).astype(np.int64))
    sizes = np.bincount(comp, minlength=n_comp)
    multi = sizes >= 2
    if not multi.any():
        return PathStats(0.0, 0, tuple(int(x) for x in ecc), 0.0, n_comp == 1, int(n_comp))
    half = sums[multi] / 2.0
    denom = sizes[multi] if literal else sizes[multi] * (sizes[multi] - 1) / 2.0
    l_ave = float(np.mean(half / denom))
    diam = ecc
    return PathStats(l_ave=l_ave, diameter=int(diam.max()),
                     component_diameters=tuple(int(x) for x in diam),
                     mean_diameter=float(diam[multi].mean()), connected=n_comp == 1,
                     components=int(n_comp))


def average_path_length(graph: GraphLike, literal: bool = False) -> float:
    return path_stats(graph, literal).l_ave


def diameter(graph: GraphLike) -> int:
    """Largest hop distance; the maximum over components when disconnected."""
    return path_stats(graph).diameter


def component_diameters(graph: GraphLike) -> list[int]:
    return list(path_stats(graph).component_diameters)


def all_pairs_hops(graph: GraphLike) -> np.ndarray:
    """Dense hop-distance matrix (``inf`` between components); small graphs only."""
    n, edges = _edges(graph)
    return shortest_path(_adjacency(n, edges), directed=False, unweighted=True)


@dataclass(frozen=True)
class DegreeStats:
    min: int
    mean: float
    max: int
    histogram: dict[int, int]


def degree_stats(graph: GraphLike) -> DegreeStats:
    n, edges = _edges(graph)
    if n == 0:
        raise EmptyGraph("graph has no nodes")
    deg = np.bincount(edges.ravel(), minlength=n) if len(edges) else np.zeros(n, dtype=np.int64)
    values, counts = np.unique(deg, return_counts=True)
    return DegreeStats(int(deg.min()), float(deg.mean()), int(deg.max()),
                       {int(v): int(c) for v, c in zip(values, counts)})


def density(graph: GraphLike) -> float:
    n, edges = _edges(graph)
    if n < 2:
        raise DegenerateGraph(f"density needs at least two nodes, got {n}")
    return 2.0 * len(edges) / (n * (n - 1))


def acl_counts(model: CyberModel) -> dict[str, int]:
    sub = sum(len(s.acls) for s in model.substations())
    utl = sum(len(u.acls) for u in model.utilities())
    reg = sum(len(r.acls) for r in model.regulatories)
    return {"substation": sub, "utility": utl, "regulatory": reg, "total": sub + utl + reg}


def count_report(model: CyberModel | None, graph: WanGraph | nx.Graph) -> dict:
    n, edges = _edges(graph)
    out: dict = {"wan_node_count": n, "wan_link_count": len(edges)}
    if isinstance(graph, WanGraph):
        out["wan_node_count_without_ucc_firewalls"] = n - graph.count(NodeKind.UCC_FIREWALL)
    if model is not None:
        out["lan_node_count_total"] = sum(len(s.nodes) for s in model.sites())
        out["acl_counts"] = acl_counts(model)
        out["dataflow_count"] = sum(1 for _ in model.all_flows())
    return out


def timing_report(timings: Mapping[str, float]) -> dict[str, float]:
    out = {}
    for stage, seconds in timings.items():
        seconds = float(seconds)
        if seconds < 0 or not np.isfinite(seconds):
            raise ValueError(f"stage {stage!r} has invalid duration {seconds}")
        out[stage] = seconds
    return out


@dataclass
class MetricsReport:
    topology: str
    l_ave: float
    diameter: int
    component_diameters: list[int]
    mean_diameter: float
    connected: bool
    degree_min: int
    degree_mean: float
    degree_max: int
    degree_histogram: dict[int, int]
    density: float
    wan_node_count: int
    wan_link_count: int
    wan_node_count_without_ucc_firewalls: int | None = None
    lan_node_count_total: int | None = None
    acl_counts: dict[str, int] | None = None
    dataflow_count: int | None = None
    literal_normalization: bool = False
    generation_time: dict[str, float] = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        d["degree_histogram"] = {str(k): v for k, v in sorted(self.degree_histogram.items())}
        if not timings:
            d.pop("generation_time")
        return d

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=1) + "\n"

    def table(self) -> str:
        rows = [("topology", self.topology), ("WAN nodes", self.wan_node_count),
                ("WAN links", self.wan_link_count),
                ("average path length (hops)", f"{self.l_ave:.4f}"),
                ("diameter (hops)", self.diameter),
                ("connected", "yes" if self.connected else f"no ({len(self.component_diameters)} components, "
                                                          f"mean diameter {self.mean_diameter:.2f})"),
                ("degree min/mean/max", f"{self.degree_min}/{self.degree_mean:.3f}/{self.degree_max}"),
                ("density", f"{self.density:.6f} ({100 * self.density:.3f}%)")]
        if self.lan_node_count_total is not None:
            rows.append(("LAN nodes (all sites)", self.lan_node_count_total))
        if self.acl_counts is not None:
            a = self.acl_counts
            rows.append(("ACLs sub/utility/BA/total",
                         f"{a['substation']}/{a['utility']}/{a['regulatory']}/{a['total']}"))
        for stage, secs in self.generation_time.items():
            rows.append((f"time: {stage} (s)", f"{secs:.3f}"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


def metrics_report(graph: GraphLike, model: CyberModel | None = None,
                   timings: Mapping[str, float] | None = None, literal: bool = False) -> MetricsReport:
    ps = path_stats(graph, literal)
    ds = degree_stats(graph)
    counts = count_report(model, graph)
    topology = graph.topology.value if isinstance(graph, WanGraph) else str(graph.graph.get("name", ""))
    return MetricsReport(
        topology=topology, l_ave=ps.l_ave, diameter=ps.diameter,
        component_diameters=list(ps.component_diameters), mean_diameter=ps.mean_diameter,
        connected=ps.connected, degree_min=ds.min, degree_mean=ds.mean, degree_max=ds.max,
        degree_histogram=ds.histogram, density=density(graph) if counts["wan_node_count"] >= 2 else 0.0,
        literal_normalization=literal, generation_time=timing_report(timings or {}), **counts)
