"""Data flows between hosts and the firewall rules that admit them.

Flows, by site that stores them:

* BA: ICCP between each member utility's ICCP host and the BA ICCP server.
* utility: DNP3 from the EMS (SCADA master) to every substation outstation.
* substation: DNP3 outstation <-> relay controller, HTTPS web server -> UCC
  HMI, SQL outstation -> local database.

Rules are evaluated first-match with an implicit deny.  Firewalls are treated
as stateful: a flow is admitted if its initiator direction is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .model import AclRule, CyberModel, CyberNode, DataFlow, NodeClass, Site
from .protocols import ProtocolTable


def _host(ip: str) -> str:
    return f"{ip}/32"


def generate_dataflows(model: CyberModel, protocols: ProtocolTable) -> CyberModel:
    if any(not n.ip_address for site in model.sites() for n in site.nodes):
        raise ValueError("addressing must be assigned before generating flows")
    port = protocols.port
    for reg in model.regulatories:
        reg.dataflows = [DataFlow(utl.node("iccp").node_id, reg.node("iccp_server").node_id,
                                  "ICCP", port("ICCP"), bidirectional=True)
                         for utl in reg.utilities]
        for utl in reg.utilities:
            ems = utl.node("ems").node_id
            hmi = utl.node("hmi").node_id
            utl.dataflows = [DataFlow(ems, sub.node("outstation").node_id, "DNP3", port("DNP3"))
                             for sub in utl.substations]
            for sub in utl.substations:
                out = sub.node("outstation").node_id
                sub.dataflows = [
                    DataFlow(out, sub.node("relay_controller").node_id, "DNP3", port("DNP3"),
                             bidirectional=True),
                    DataFlow(sub.node("web").node_id, hmi, "HTTPS", port("HTTPS")),
                    DataFlow(out, sub.node("db").node_id, "SQL", port("SQL")),
                ]
    return model


def synthesize_acls(model: CyberModel, protocols: ProtocolTable) -> CyberModel:
    """Three rules per substation, S + 4 per utility, one per utility at the BA."""
    port = protocols.port
    for reg in model.regulatories:
        server = reg.node("iccp_server")
        fw = reg.firewall.node_id
        reg.acls = [AclRule(fw, "allow", _host(utl.node("iccp").ip_address), _host(server.ip_address),
                            "ICCP", port("ICCP"), f"iccp-in-{utl.key}")
                    for utl in reg.utilities]
        for utl in reg.utilities:
            ufw = utl.firewall.node_id
            ems = utl.node("ems").ip_address
            hmi = utl.node("hmi").ip_address
            iccp = utl.node("iccp").ip_address
            rules = [AclRule(ufw, "allow", _host(ems), _host(sub.node("outstation").ip_address),
                             "DNP3", port("DNP3"), f"dnp3-out-{sub.key}")
                     for sub in utl.substations]
            rules += [
                AclRule(ufw, "allow", _host(iccp), _host(server.ip_address), "ICCP", port("ICCP"),
                        "iccp-out"),
                AclRule(ufw, "allow", _host(server.ip_address), _host(iccp), "ICCP", port("ICCP"),
                        "iccp-in"),
                AclRule(ufw, "allow", f"10.{utl.index}.0.0/16", _host(hmi), "HTTPS", port("HTTPS"),
                        "https-in"),
                AclRule(ufw, "deny", "0.0.0.0/0", "0.0.0.0/0", "any", 0, "deny-all"),
            ]
            utl.acls = rules
            for sub in utl.substations:
                sfw = sub.firewall.node_id
                out = sub.node("outstation").ip_address
                sub.acls = [
                    AclRule(sfw, "allow", _host(ems), _host(out), "DNP3", port("DNP3"), "dnp3-in"),
                    AclRule(sfw, "allow", _host(sub.node("web").ip_address), _host(hmi), "HTTPS",
                            port("HTTPS"), "https-out"),
                    AclRule(sfw, "allow", _host(out), _host(sub.node("db").ip_address), "SQL",
                            port("SQL"), "sql-local"),
                ]
    return model


def permits(rules: list[AclRule], src_ip: str, dst_ip: str, protocol: str, port: int) -> bool:
    for rule in rules:
        if rule.matches(src_ip, dst_ip, protocol, port):
            return rule.action == "allow"
    return False


@dataclass
class FlowPaths:
    """Firewalls crossed by each flow, from LAN shortest paths plus the WAN hop."""

    model: CyberModel

    def __post_init__(self) -> None:
        self.nodes: dict[str, CyberNode] = self.model.node_index()
        self.site: dict[str, Site] = self.model.site_of()
        self._graphs: dict[int, nx.Graph] = {}

    def _lan(self, site: Site) -> nx.Graph:
        g = self._graphs.get(id(site))
        if g is None:
            g = nx.Graph()
            g.add_nodes_from(n.node_id for n in site.nodes)
            g.add_edges_from((l.source, l.destination) for l in site.links)
            self._graphs[id(site)] = g
        return g

    def lan_path(self, site: Site, a: str, b: str) -> list[str]:
        return nx.shortest_path(self._lan(site), a, b)

    def node_path(self, flow: DataFlow) -> list[str]:
        """Node ids along the flow; the WAN segment is collapsed to the two site routers."""
        s_site, d_site = self.site[flow.src], self.site[flow.dst]
        if s_site is d_site:
            return self.lan_path(s_site, flow.src, flow.dst)
        out = self.lan_path(s_site, flow.src, s_site.node("router").node_id)
        back = self.lan_path(d_site, d_site.node("router").node_id, flow.dst)
        return out + back

    def firewalls(self, flow: DataFlow) -> list[str]:
        return [v for v in self.node_path(flow) if self.nodes[v].node_class is NodeClass.FIREWALL]

    def crosses_wan(self, flow: DataFlow) -> bool:
        return self.site[flow.src] is not self.site[flow.dst]


def annotate_link_protocols(model: CyberModel, paths: FlowPaths | None = None) -> None:
    """Record on every LAN link the protocols of the flows routed over it."""
    paths = paths or FlowPaths(model)
    carried: dict[frozenset, set[str]] = {}
    for flow in model.all_flows():
        p = paths.node_path(flow)
        for a, b in zip(p, p[1:]):
            carried.setdefault(frozenset((a, b)), set()).add(flow.protocol)
    for site in model.sites():
        for link in site.links:
            link.protocols = tuple(sorted(carried.get(frozenset((link.source, link.destination)), ())))


def unjustified_rules(model: CyberModel, paths: FlowPaths | None = None) -> list[AclRule]:
    """Allow rules that no flow crossing their firewall matches."""
    paths = paths or FlowPaths(model)
    nodes = paths.nodes
    crossing: dict[str, list[DataFlow]] = {}
    for flow in model.all_flows():
        for fw in paths.firewalls(flow):
            crossing.setdefault(fw, []).append(flow)
    bad = []
    for rule in model.all_acls():
        if rule.action != "allow":
            continue
        ok = False
        for f in crossing.get(rule.firewall, ()):
            s, d = nodes[f.src].ip_address, nodes[f.dst].ip_address
            if rule.matches(s, d, f.protocol, f.port) or (
                    f.bidirectional and rule.matches(d, s, f.protocol, f.port)):
                ok = True
                break
        if not ok:
            bad.append(rule)
    return bad


def blocked_flows(model: CyberModel, paths: FlowPaths | None = None,
                  wan_only: bool = False) -> list[tuple[DataFlow, str]]:
    """``(flow, firewall)`` pairs where a firewall on the path rejects the flow."""
    paths = paths or FlowPaths(model)
    nodes = paths.nodes
    rules: dict[str, list[AclRule]] = {}
    for site in model.sites():
        for rule in site.acls:
            rules.setdefault(rule.firewall, []).append(rule)
    bad = []
    for flow in model.all_flows():
        if wan_only and not paths.crosses_wan(flow):
            continue
        s, d = nodes[flow.src].ip_address, nodes[flow.dst].ip_address
        for fw in paths.firewalls(flow):
            if not permits(rules.get(fw, []), s, d, flow.protocol, flow.port):
                bad.append((flow, fw))
    return bad
