"""Router-level wide-area graphs, one builder per topology.

Every topology uses the same node set: one gateway router per substation, a
router and a firewall per utility control center, and one router per
balancing authority.  Node ids are laid out as substations first (in case
order), then ``(UccRouter, UccFirewall)`` pairs per utility, then BA routers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import networkx as nx
import numpy as np

from ..geo import haversine_km
from ..ingest import GridCase, SubstationKind, classify
from ..placement import SitePlan
from .generators import DEFAULT_PROFILE, DegreeProfile, statistics_graph
from .overlay import align_overlay

COORD_DIGITS = 6
SUB_LINK_BPS = 100_000_000
CORE_LINK_BPS = 1_000_000_000


class NodeKind(str, enum.Enum):
    SUBSTATION_ROUTER = "SubstationRouter"
    UCC_ROUTER = "UccRouter"
    UCC_FIREWALL = "UccFirewall"
    BA_ROUTER = "BaRouter"


class Media(str, enum.Enum):
    FIBER = "fiber"
    MICROWAVE = "microwave"
    CELLULAR = "cellular"


class LinkKind(str, enum.Enum):
    SUB_TO_UCC = "sub_to_ucc"
    SUB_TO_SUB = "sub_to_sub"
    UCC_INTERNAL = "ucc_internal"
    UCC_TO_BA = "ucc_to_ba"


class Topology(str, enum.Enum):
    STAR = "star"
    RADIAL = "radial"
    STATISTICS = "statistics"


@dataclass(frozen=True)
class WanNode:
    node_id: int
    kind: NodeKind
    owner: str
    coord: tuple[float, float]
    sub_id: int | None = None
    utility: int | None = None  # 0-based
    ba: int | None = None  # 0-based


@dataclass(frozen=True)
class WanLink:
    endpoint_a: int
    endpoint_b: int
    media: Media
    bandwidth: int
    length: float
    link_kind: LinkKind


@dataclass
class WanGraph:
    topology: Topology
    nodes: list[WanNode]
    links: list[WanLink]
    metadata: dict = field(default_factory=dict)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for n in self.nodes:
            g.add_node(n.node_id, kind=n.kind.value, owner=n.owner, lat=n.coord[0], lon=n.coord[1])
        for l in self.links:
            g.add_edge(l.endpoint_a, l.endpoint_b, kind=l.link_kind.value, length=l.length,
                       media=l.media.value, bandwidth=l.bandwidth)
        return g

    def node_of_sub(self) -> dict[int, int]:
        return {n.sub_id: n.node_id for n in self.nodes if n.sub_id is not None}

    def count(self, kind: NodeKind) -> int:
        return sum(1 for n in self.nodes if n.kind == kind)


DistanceFn = Callable[[WanNode, WanNode], float]


def _round(coord: tuple[float, float]) -> tuple[float, float]:
    return (round(float(coord[0]), COORD_DIGITS), round(float(coord[1]), COORD_DIGITS))


class _Builder:
    """Shared node layout and link bookkeeping for all three topologies."""

    def __init__(self, topology: Topology, case: GridCase, plan: SitePlan,
                 distance: DistanceFn | None):
        self.topology = topology
        self.case = case
        self.plan = plan
        self.distance = distance or (lambda a, b: haversine_km(a.coord, b.coord))
        self.nodes: list[WanNode] = []
        self.links: list[WanLink] = []
        self._pairs: set[tuple[int, int]] = set()
        s = len(case.substations)
        u = plan.n_utilities
        self.sub_node: dict[int, int] = {}
        for i, sub in enumerate(case.substations):
            ut = plan.utility_of[sub.sub_id]
            self.nodes.append(WanNode(i, NodeKind.SUBSTATION_ROUTER, plan.sub_labels[sub.sub_id],
                                      _round(sub.coord), sub.sub_id, ut, plan.utility_ba[ut]))
            self.sub_node[sub.sub_id] = i
        self.ucc_router = [s + 2 * k for k in range(u)]
        self.ucc_firewall = [s + 2 * k + 1 for k in range(u)]
        for k, cl in enumerate(plan.utilities):
            c = _round(cl.centroid)
            lab = plan.utility_labels[k]
            self.nodes.append(WanNode(self.ucc_router[k], NodeKind.UCC_ROUTER, lab, c, None, k, plan.utility_ba[k]))
            self.nodes.append(WanNode(self.ucc_firewall[k], NodeKind.UCC_FIREWALL, lab, c, None, k, plan.utility_ba[k]))
        self.ba_router = [s + 2 * u + b for b in range(plan.n_bas)]
        for b, site in enumerate(plan.ba_sites):
            self.nodes.append(WanNode(self.ba_router[b], NodeKind.BA_ROUTER, plan.ba_labels[b], _round(site), None, None, b))

    def link(self, a: int, b: int, kind: LinkKind, bandwidth: int = SUB_LINK_BPS) -> bool:
        if a == b:
            return False
        key = (min(a, b), max(a, b))
        if key in self._pairs:
            return False
        self._pairs.add(key)
        na, nb = self.nodes[a], self.nodes[b]
        if na.coord == nb.coord:
            length = 0.0
        elif kind is LinkKind.SUB_TO_SUB:
            length = self.distance(na, nb)
        else:
            length = haversine_km(na.coord, nb.coord)
        self.links.append(WanLink(key[0], key[1], Media.FIBER, bandwidth, round(length, 4), kind))
        return True

    def core_links(self) -> None:
        for k in range(self.plan.n_utilities):
            self.link(self.ucc_router[k], self.ucc_firewall[k], LinkKind.UCC_INTERNAL, CORE_LINK_BPS)
            self.link(self.ucc_firewall[k], self.ba_router[self.plan.utility_ba[k]],
                      LinkKind.UCC_TO_BA, CORE_LINK_BPS)

    def graph(self, **metadata) -> WanGraph:
        metadata.setdefault("substations", len(self.case.substations))
        metadata.setdefault("utilities", self.plan.n_utilities)
        metadata.setdefault("bas", self.plan.n_bas)
        return WanGraph(self.topology, self.nodes, self.links, metadata)


def _check_plan(case: GridCase, plan: SitePlan) -> None:
    missing = [s.sub_id for s in case.substations if s.sub_id not in plan.utility_of]
    if missing:
        raise ValueError(f"site plan does not cover substations {missing[:5]}")
    if not plan.ba_sites:
        raise ValueError("site plan has no balancing authorities; run place_bas first")


def build_star(case: GridCase, plan: SitePlan, distance: DistanceFn | None = None) -> WanGraph:
    _check_plan(case, plan)
    b = _Builder(Topology.STAR, case, plan, distance)
    for sub in case.substations:
        b.link(b.sub_node[sub.sub_id], b.ucc_router[plan.utility_of[sub.sub_id]], LinkKind.SUB_TO_UCC)
    b.core_links()
    return b.graph()


def build_radial(case: GridCase, plan: SitePlan, distance: DistanceFn | None = None) -> WanGraph:
    """Generation substations hang off the transmission substations they share a branch with.

    Only branches inside one utility count.  Generation substations with no
    such neighbour link straight to their UCC router.
    """
    _check_plan(case, plan)
    b = _Builder(Topology.RADIAL, case, plan, distance)
    kinds = {s.sub_id: classify(s) for s in case.substations}
    neighbours: dict[int, set[int]] = {s.sub_id: set() for s in case.substations}
    for br in case.branches:
        if br.is_self_loop or br.sub_from not in kinds or br.sub_to not in kinds:
            continue
        if plan.utility_of[br.sub_from] != plan.utility_of[br.sub_to]:
            continue
        neighbours[br.sub_from].add(br.sub_to)
        neighbours[br.sub_to].add(br.sub_from)
    fallback = 0
    for sub in case.substations:
        sid = sub.sub_id
        ucc = b.ucc_router[plan.utility_of[sid]]
        if kinds[sid] == SubstationKind.TRANSMISSION:
            b.link(b.sub_node[sid], ucc, LinkKind.SUB_TO_UCC)
            continue
        trans = sorted(n for n in neighbours[sid] if kinds[n] == SubstationKind.TRANSMISSION)
        if not trans:
            b.link(b.sub_node[sid], ucc, LinkKind.SUB_TO_UCC)
            fallback += 1
        for t in trans:
            b.link(b.sub_node[sid], b.sub_node[t], LinkKind.SUB_TO_SUB)
    b.core_links()
    return b.graph(orphan_generation_fallbacks=fallback)


def build_statistics(case: GridCase, plan: SitePlan, profile: DegreeProfile = DEFAULT_PROFILE,
                     seed: int = 0, distance: DistanceFn | None = None,
                     optimal_matching: bool = False) -> WanGraph:
    """Degree-statistics mesh per utility, overlaid on substation geography.

    For a utility with ``n`` substations a graph on ``n + 1`` nodes is drawn;
    its highest-degree node (lowest id on ties) becomes the UCC router and the
    others are matched to substations by :func:`align_overlay`.
    """
    _check_plan(case, plan)
    b = _Builder(Topology.STATISTICS, case, plan, distance)
    by_id = case.by_id()
    children = np.random.SeedSequence(seed).spawn(plan.n_utilities)
    per_utility = []
    for k, cluster in enumerate(plan.utilities):
        members = sorted(cluster.member_sub_ids, key=lambda sid: b.sub_node[sid])
        g = statistics_graph(len(members) + 1, profile, np.random.default_rng(children[k]))
        hub = max(g.nodes, key=lambda v: (g.degree(v), -v))
        others = [v for v in sorted(g.nodes) if v != hub]
        cyber = [g.nodes[v]["pos"] for v in others]
        power = [by_id[sid].coord for sid in members]
        al = align_overlay(cyber, power, optimal=optimal_matching and len(members) <= 500)
        where = {hub: b.ucc_router[k]}
        for ci, pi in al.mapping.items():
            where[others[ci]] = b.sub_node[members[pi]]
        for u, v in sorted(g.edges()):
            a, c = where[u], where[v]
            kind = LinkKind.SUB_TO_UCC if hub in (u, v) else LinkKind.SUB_TO_SUB
            b.link(a, c, kind)
        per_utility.append({"utility": k, "angle_deg": al.angle_deg, "cost": round(al.cost, 9),
                            "degree_added": g.graph["degree_added"],
                            "bridges_added": g.graph["bridges_added"]})
    b.core_links()
    return b.graph(seed=seed, profile=profile.to_dict(), per_utility=per_utility)


BUILDERS = {Topology.STAR: build_star, Topology.RADIAL: build_radial,
            Topology.STATISTICS: build_statistics}


def build_wan(topology: str | Topology, case: GridCase, plan: SitePlan, *,
              profile: DegreeProfile = DEFAULT_PROFILE, seed: int = 0,
              distance: DistanceFn | None = None) -> WanGraph:
    topology = Topology(topology)
    if topology is Topology.STATISTICS:
        return build_statistics(case, plan, profile, seed, distance)
    return BUILDERS[topology](case, plan, distance)
