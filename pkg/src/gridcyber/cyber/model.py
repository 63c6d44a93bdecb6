"""Cyber-physical object model: sites holding LAN nodes, links, flows and ACLs.

A :class:`Regulatory` (balancing authority) owns :class:`Utility` objects,
which own :class:`Substation` objects.  Every site carries its own LAN nodes
and links, the data flows it originates and the ACL rules of its firewall.
"""

from __future__ import annotations

import enum
import functools
import ipaddress
from dataclasses import dataclass, field
from typing import Iterator

from ..ingest import SubstationKind
from ..wan.topology import WanGraph


class NodeClass(str, enum.Enum):
    ROUTER = "router"
    FIREWALL = "firewall"
    SWITCH = "switch"
    HOST = "host"
    RELAY = "relay"
    RELAY_CONTROLLER = "relay_controller"


class Vlan(enum.IntEnum):
    OT = 10
    ADMIN = 20
    DMZ = 30
    ROUTING = 40


@dataclass
class CyberNode:
    node_id: str
    node_class: NodeClass
    role: str
    region: str
    utility: str
    label: str
    vlan: Vlan
    substation: str | None = None
    ip_address: str = ""
    open_ports: tuple[tuple[int, str], ...] = ()
    protocols: tuple[str, ...] = ()


@dataclass
class CyberLink:
    source: str
    destination: str
    media: str = "ethernet"
    bandwidth: int = 1_000_000_000
    distance: float = 0.0
    protocols: tuple[str, ...] = ()


@dataclass
class DataFlow:
    src: str
    dst: str
    protocol: str
    port: int
    bidirectional: bool = False

    @property
    def direction(self) -> str:
        return f"{self.src}->{self.dst}"


_address = functools.lru_cache(maxsize=None)(ipaddress.ip_address)
_network = functools.lru_cache(maxsize=None)(ipaddress.ip_network)


@dataclass
class AclRule:
    firewall: str
    action: str  # "allow" | "deny"
    src_cidr: str
    dst_cidr: str
    protocol: str  # protocol name or "any"
    port: int  # 0 means any port
    name: str = ""

    def matches(self, src_ip: str, dst_ip: str, protocol: str, port: int) -> bool:
        return (self.protocol in ("any", protocol) and self.port in (0, port)
                and _address(src_ip) in _network(self.src_cidr)
                and _address(dst_ip) in _network(self.dst_cidr))


@dataclass
class Site:
    label: str
    coord: tuple[float, float]
    nodes: list[CyberNode] = field(default_factory=list)
    links: list[CyberLink] = field(default_factory=list)
    networklan: str = ""
    dataflows: list[DataFlow] = field(default_factory=list)
    acls: list[AclRule] = field(default_factory=list)

    def node(self, role: str) -> CyberNode:
        for n in self.nodes:
            if n.role == role:
                return n
        raise KeyError(f"{self.label}: no node with role {role!r}")

    def nodes_with(self, role: str) -> list[CyberNode]:
        return [n for n in self.nodes if n.role == role]

    @property
    def firewall(self) -> CyberNode:
        return self.node("firewall")


@dataclass
class Substation(Site):
    sub_id: int = 0
    name: str = ""
    kind: SubstationKind = SubstationKind.TRANSMISSION
    relaynum: int = 0
    index: int = 0  # 1-based position within its utility

    @property
    def key(self) -> str:
        return f"sub{self.sub_id}"


@dataclass
class Utility(Site):
    index: int = 0  # 1-based
    region: str = ""
    substations: list[Substation] = field(default_factory=list)

    @property
    def key(self) -> str:
        return f"utl{self.index}"


@dataclass
class Regulatory(Site):
    index: int = 0  # 1-based
    utilities: list[Utility] = field(default_factory=list)

    @property
    def key(self) -> str:
        return f"ba{self.index}"


@dataclass
class CyberModel:
    case_name: str
    topology: str
    regulatories: list[Regulatory] = field(default_factory=list)
    wan: WanGraph | None = None
    metadata: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict, compare=False)  # seconds per stage

    def utilities(self) -> Iterator[Utility]:
        for reg in self.regulatories:
            yield from reg.utilities

    def substations(self) -> Iterator[Substation]:
        for utl in self.utilities():
            yield from utl.substations

    def sites(self) -> Iterator[Site]:
        for reg in self.regulatories:
            yield reg
            for utl in reg.utilities:
                yield utl
                yield from utl.substations

    def node_index(self) -> dict[str, CyberNode]:
        return {n.node_id: n for site in self.sites() for n in site.nodes}

    def site_of(self) -> dict[str, Site]:
        return {n.node_id: site for site in self.sites() for n in site.nodes}

    def all_flows(self) -> Iterator[DataFlow]:
        for site in self.sites():
            yield from site.dataflows

    def all_acls(self) -> Iterator[AclRule]:
        for site in self.sites():
            yield from site.acls
